#include "prefixseal/prefix_search.hpp"

#include <algorithm>
#include <unordered_set>

#include "prefixseal/field_codec.hpp"

namespace prefixseal {

namespace {

std::vector<std::string> unique_ids(std::span<const CorpusEntry> corpus, const std::vector<std::size_t>& positions) {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (std::size_t p : positions) {
        const auto& id = corpus[p].record_id;
        if (seen.insert(id).second) out.push_back(id);
    }
    return out;
}

} // namespace

bool match_prefix(std::string_view serialized_ct, std::string_view token) noexcept {
    return serialized_ct.starts_with(token);
}

std::vector<std::string> search_corpus(std::span<const CorpusEntry> corpus, std::string_view token) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (match_prefix(corpus[i].value, token)) hits.push_back(i);
    return unique_ids(corpus, hits);
}

SortedPrefixIndex::SortedPrefixIndex(std::span<const CorpusEntry> corpus) {
    sorted_.reserve(corpus.size());
    ids_.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        sorted_.emplace_back(corpus[i].value, i);
        ids_.push_back(corpus[i].record_id);
    }
    std::sort(sorted_.begin(), sorted_.end());
}

std::vector<std::size_t> SortedPrefixIndex::positions(std::string_view token) const {
    std::vector<std::size_t> hits;
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), token,
                               [](const auto& entry, std::string_view t) { return std::string_view(entry.first) < t; });
    for (; it != sorted_.end() && match_prefix(it->first, token); ++it) hits.push_back(it->second);
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<std::string> SortedPrefixIndex::search(std::string_view token) const {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (std::size_t p : positions(token))
        if (seen.insert(ids_[p]).second) out.push_back(ids_[p]);
    return out;
}

std::vector<std::string> oracle_search(std::span<const CorpusEntry> plain_corpus, std::string_view term,
                                       unsigned pref_len) {
    const std::string needle = encode_utf8(partition(normalize(term), pref_len).prefix);
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < plain_corpus.size(); ++i)
        if (normalize(plain_corpus[i].value).starts_with(needle)) hits.push_back(i);
    return unique_ids(plain_corpus, hits);
}

} // namespace prefixseal
