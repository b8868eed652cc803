#include "prefixseal/cli/names.hpp"

#include <array>
#include <random>

namespace prefixseal::cli {

std::vector<std::string> synthetic_names(std::size_t count, std::uint64_t seed) {
    static constexpr std::array<const char*, 24> heads = {
        "Ro", "Ma", "Bi", "Co", "Fe", "Ri", "Ru", "Gal", "Es", "Lo", "Mo", "Ba",
        "Ca", "De", "Fo", "Gre", "Leo", "Ma", "Ne", "Pa", "Sa", "Tu", "Vi", "Zan"};
    static constexpr std::array<const char*, 20> middles = {
        "ss", "r", "nc", "st", "ll", "cc", "mb", "t", "gn", "l",
        "rd", "nt", "s", "sc", "v", "zz", "nd", "rr", "p", "m"};
    static constexpr std::array<const char*, 14> tails = {
        "i", "a", "o", "ini", "etti", "elli", "one", "ari", "ucci", "ò", "esi", "ato", "ini", "à"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string name = heads[rng() % heads.size()];
        const int parts = 1 + static_cast<int>(rng() % 2);
        for (int p = 0; p < parts; ++p) {
            name += middles[rng() % middles.size()];
            if (p + 1 < parts) name += "a";
        }
        name += tails[rng() % tails.size()];
        out.push_back(std::move(name));
    }
    return out;
}

} // namespace prefixseal::cli
