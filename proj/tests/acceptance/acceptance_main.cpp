// Acceptance gate: one PASS/FAIL line per release criterion, non-zero exit if
// any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "prefixseal/cli.hpp"
#include "prefixseal/cli/names.hpp"
#include "prefixseal/crypto/aes_gcm_siv.hpp"
#include "prefixseal/crypto/argon2.hpp"
#include "prefixseal/error.hpp"
#include "prefixseal/field_cipher.hpp"
#include "prefixseal/prefix_search.hpp"
#include "prefixseal/store/http_service.hpp"
#include "prefixseal/store/store_client.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace prefixseal;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

KdfParams default_params(std::uint8_t salt_byte) {
    KdfParams p;
    p.salt.fill(salt_byte);
    return p;
}

std::string head_of(std::string_view ct) { return std::string(authenticated_head(ct)); }
std::string tags_of(std::string_view ct) {
    const std::string head = head_of(ct);
    return head.substr(6, head.size() - 7);
}
std::string body_of(std::string_view ct) { return std::string(ct.substr(head_of(ct).size())); }

int cli_run(std::vector<std::string> args, std::string& out, std::string& err) {
    args.insert(args.begin(), "prefixseal");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream o, e;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    err = e.str();
    return code;
}

Outcome round_trip() {
    std::mt19937_64 rng(1001);
    std::vector<std::string> texts;
    for (int i = 0; i < 1000; ++i) texts.push_back(encode_utf8(testing::random_u32(rng, 32)));
    const char* passwords[] = {"first password", "zweites Passwort", "terza parola d'ordine"};
    std::size_t ok = 0, total = 0;
    double seconds = 0;
    for (int p = 0; p < 3; ++p) {
        const KeyRing ring = derive_keyring(passwords[p], default_params(static_cast<std::uint8_t>(p + 1)));
        const auto t0 = Clock::now();
        for (unsigned k : {0u, 1u, 3u, 8u}) {
            const EncryptionContext ctx(ring, FieldId("value"), k);
            for (const auto& t : texts) {
                ++total;
                if (decrypt_text(ctx, encrypt_text(ctx, t)) == normalize(t)) ++ok;
            }
        }
        seconds += seconds_since(t0);
    }
    return {ok == total && seconds < 30.0,
            std::to_string(ok) + "/" + std::to_string(total) + " round trips in " + fmt(seconds) + " s excluding KDF"};
}

Outcome prefix_determinism() {
    const KeyRing ring = derive_keyring("determinism", default_params(9));
    constexpr unsigned k = 8;
    const EncryptionContext ctx(ring, FieldId("value"), k);
    std::mt19937_64 rng(2002);
    std::size_t agree = 0, pairs = 0;
    const std::size_t chars = base64url_length(kDefaultTokenWidth);
    while (pairs < 200) {
        const std::u32string a = decode_utf8(normalize(encode_utf8(testing::random_u32(rng, 12))));
        if (a.empty()) continue;
        const std::size_t j = 1 + rng() % std::min<std::size_t>(a.size(), k);
        const std::string b = normalize(encode_utf8(a.substr(0, j) + testing::random_u32(rng, 10)));
        // Composition across the boundary can change the shared prefix; such
        // pairs do not share j characters and are redrawn.
        if (decode_utf8(b).substr(0, j) != a.substr(0, j)) continue;
        ++pairs;
        const auto ca = encrypt_text(ctx, encode_utf8(a));
        const auto cb = encrypt_text(ctx, b);
        const std::size_t n = 6 + j * chars;
        if (ca.substr(0, n) == cb.substr(0, n)) ++agree;
    }
    return {agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) +
                                " pairs agree on header and first j tags (pref_len 8)"};
}

Outcome suffix_randomness() {
    const KeyRing ring = derive_keyring("randomness", default_params(10));
    const EncryptionContext ctx(ring, FieldId("lastname"), 3);
    const EncryptionContext zero(ring, FieldId("lastname"), 0);
    std::set<std::string> bodies, tags, zero_payloads;
    for (int i = 0; i < 100; ++i) {
        const auto ct = encrypt_text(ctx, "Rossini");
        bodies.insert(body_of(ct));
        tags.insert(tags_of(ct));
        zero_payloads.insert(encrypt_text(zero, "Rossini").substr(6));
    }
    const bool pass = bodies.size() == 100 && tags.size() == 1 && zero_payloads.size() == 100;
    return {pass, std::to_string(bodies.size()) + " distinct bodies, " + std::to_string(tags.size()) +
                      " tag section(s), " + std::to_string(zero_payloads.size()) + " distinct pref_len-0 payloads"};
}

Outcome oracle_equivalence() {
    const KeyRing ring = derive_keyring("oracle", default_params(11));
    constexpr unsigned k = 5;
    const auto names = cli::synthetic_names(500, 3003);
    std::vector<CorpusEntry> plain;
    for (std::size_t i = 0; i < names.size(); ++i) plain.push_back({"r" + std::to_string(i), names[i]});
    std::set<std::string> queries;
    for (const auto& n : names) {
        const auto chars = decode_utf8(normalize(n));
        for (std::size_t len = 1; len <= 5 && len <= chars.size(); ++len) queries.insert(encode_utf8(chars.substr(0, len)));
    }

    std::size_t exact_mismatch = 0, superset_violations = 0, extras = 0, chains = 0, monotone = 0;
    for (std::size_t width : {std::size_t{16}, kDefaultTokenWidth}) {
        const EncryptionContext ctx(ring, FieldId("lastname"), k, width);
        std::vector<CorpusEntry> sealed;
        for (const auto& e : plain) sealed.push_back({e.record_id, encrypt_text(ctx, e.value)});
        const SortedPrefixIndex index(sealed);
        for (const auto& q : queries) {
            auto got = index.search(make_query_token(ctx, q));
            auto want = oracle_search(plain, q, k);
            if (width == 16) {
                if (got != want) ++exact_mismatch;
                continue;
            }
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            if (!std::includes(got.begin(), got.end(), want.begin(), want.end())) ++superset_violations;
            extras += got.size() - std::min(got.size(), want.size());
        }
        if (width != kDefaultTokenWidth) continue;
        for (const auto& n : names) {
            const auto chars = decode_utf8(normalize(n));
            std::size_t previous = SIZE_MAX;
            bool ok = true;
            for (std::size_t len = 1; len <= 5 && len <= chars.size(); ++len) {
                const std::size_t count = index.search(make_query_token(ctx, encode_utf8(chars.substr(0, len)))).size();
                ok = ok && count <= previous;
                previous = count;
            }
            ++chains;
            if (ok) ++monotone;
        }
    }
    const bool pass = exact_mismatch == 0 && superset_violations == 0 && monotone == chains;
    return {pass, std::to_string(queries.size()) + " queries; width 16 mismatches " + std::to_string(exact_mismatch) +
                      "; width 3 superset violations " + std::to_string(superset_violations) + ", extra hits " +
                      std::to_string(extras) + "; monotone chains " + std::to_string(monotone) + "/" +
                      std::to_string(chains)};
}

Outcome wrong_password_rejection() {
    const KdfParams params = default_params(12);
    const KeyRing owner = derive_keyring("the owner's password", params);
    const CheckWordSet words = make_check_words(owner);
    const EncryptionContext owner_ctx(owner, FieldId("lastname"), 3);
    const std::string ct = encrypt_text(owner_ctx, "Lombardi");
    if (!verify_password(owner, words)) return {false, "owner password rejected"};

    std::mt19937_64 rng(4004);
    std::size_t rejected = 0, auth_failed = 0;
    for (int i = 0; i < 100; ++i) {
        std::string guess = encode_utf8(testing::random_u32(rng, 16)) + std::to_string(i);
        const KeyRing ring = derive_keyring(guess, params);
        if (!verify_password(ring, words)) ++rejected;
        try {
            decrypt_text(EncryptionContext(ring, FieldId("lastname"), 3), ct);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::AuthenticationFailed) ++auth_failed;
        }
    }

    const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_.v";
    std::size_t mutations = 0, silent = 0;
    while (mutations < 1000) {
        std::string m = ct;
        switch (rng() % 4) {
        case 0: m[rng() % m.size()] = alphabet[rng() % alphabet.size()]; break;
        case 1: m.erase(rng() % m.size(), 1); break;
        case 2: m.insert(rng() % (m.size() + 1), 1, alphabet[rng() % alphabet.size()]); break;
        default: m.resize(rng() % m.size()); break;
        }
        if (m == ct) continue;
        ++mutations;
        try {
            decrypt_text(owner_ctx, m);
            ++silent;
        } catch (const Error&) {
        }
    }
    const bool pass = rejected == 100 && auth_failed == 100 && silent == 0;
    return {pass, "verify false " + std::to_string(rejected) + "/100, AuthenticationFailed " +
                      std::to_string(auth_failed) + "/100, silent decryptions " + std::to_string(silent) + "/" +
                      std::to_string(mutations)};
}

Outcome primitive_conformance() {
    std::size_t siv_ok = 0, siv_rfc = 0, argon_ok = 0, argon_total = 0;
    for (const auto& v : testing::load_json("aes_gcm_siv_vectors.json")) {
        const bool rfc = v["source"].get<std::string>().starts_with("rfc8452");
        bool all = true;
        for (auto* a : kernels::aes_kernels())
            for (auto* p : kernels::polyval_kernels()) {
                if (!a->available() || !p->available()) continue;
                const crypto::AesGcmSiv aead(testing::unhex(v["key"]), {a, p});
                all = all && aead.seal(testing::unhex(v["nonce"]), testing::unhex(v["plaintext"]),
                                       testing::unhex(v["aad"])) == testing::unhex(v["ciphertext"]);
            }
        if (rfc) {
            ++siv_rfc;
            if (all) ++siv_ok;
        }
    }
    for (const auto& v : testing::load_json("argon2id_vectors.json")) {
        ++argon_total;
        const auto password = testing::unhex(v["password"]);
        const auto salt = testing::unhex(v["salt"]);
        const auto secret = testing::unhex(v["secret"]);
        const auto ad = testing::unhex(v["ad"]);
        const auto expected = testing::unhex(v["tag"]);
        crypto::Argon2Params params;
        params.time_cost = v["time_cost"];
        params.memory_cost_kib = v["memory_cost"];
        params.parallelism = v["parallelism"];
        params.tag_length = static_cast<std::uint32_t>(expected.size());
        bool all = true;
        for (auto* k : kernels::argon2_kernels()) {
            if (!k->available()) continue;
            all = all && crypto::argon2id({password, salt, secret, ad}, params, *k) == expected;
        }
        if (all) ++argon_ok;
    }
    const bool pass = siv_ok >= 10 && siv_ok == siv_rfc && argon_ok >= 3 && argon_ok == argon_total;
    return {pass, "RFC 8452 vectors " + std::to_string(siv_ok) + "/" + std::to_string(siv_rfc) +
                      ", Argon2id reference vectors " + std::to_string(argon_ok) + "/" + std::to_string(argon_total) +
                      " on every available kernel"};
}

// Shared by the batch and zero-plaintext criteria.
struct Pipeline {
    bool ran = false;
    std::string failure;
    double encrypt_seconds = 0;
    std::size_t rows = 0;
    bool durable = false;
    std::size_t queries = 0;
    std::vector<std::string> fixture_values;
    std::string persisted;
    std::string responses;
};

const std::vector<std::string> kCities = {"San Marino", "Reggio Emilia", "La Spezia", "Ascoli Piceno", "Vibo Valentia"};

Pipeline& pipeline() {
    static Pipeline p;
    if (p.ran) return p;
    p.ran = true;
    const fs::path dir = fs::temp_directory_path() / ("prefixseal_acceptance_" + std::to_string(getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    try {
        const auto schema_path = dir / "schema.json";
        std::ofstream(schema_path) << R"({"fields":{"firstname":{"encrypted":true,"pref_len":3},)"
                                      R"("lastname":{"encrypted":true,"pref_len":4},"city":{"encrypted":false}}})";
        const auto firsts = cli::synthetic_names(10000, 51);
        const auto lasts = cli::synthetic_names(10000, 52);
        {
            std::ofstream csv(dir / "people.csv");
            csv << "id,firstname,lastname,city\n";
            for (std::size_t i = 0; i < 10000; ++i)
                csv << "p" << i << ',' << firsts[i] << ',' << lasts[i] << ',' << kCities[i % kCities.size()] << '\n';
        }
        p.fixture_values = firsts;
        p.fixture_values.insert(p.fixture_values.end(), lasts.begin(), lasts.end());

        setenv("PREFIXSEAL_PASSWORD", "batch pipeline password", 1);
        const std::vector<std::string> common = {"--material", (dir / "material.json").string()};
        std::string out, err;
        auto with = [&](std::vector<std::string> extra) {
            auto args = common;
            args.insert(args.end(), extra.begin(), extra.end());
            return args;
        };
        if (cli_run(with({"init"}), out, err) != 0) throw std::runtime_error("init failed: " + err);
        const auto t0 = Clock::now();
        if (cli_run(with({"encrypt-file", "--schema", schema_path.string(), "--input", (dir / "people.csv").string(),
                          "--output", (dir / "people.jsonl").string()}),
                    out, err) != 0)
            throw std::runtime_error("encrypt-file failed: " + err);
        p.encrypt_seconds = seconds_since(t0);

        std::vector<store::StoredRecord> records;
        {
            std::ifstream in(dir / "people.jsonl");
            for (std::string line; std::getline(in, line);)
                records.push_back(store::record_from_json(nlohmann::json::parse(line)));
        }
        p.rows = records.size();

        const KdfParams params = [&] {
            const auto doc = nlohmann::json::parse(std::ifstream(dir / "material.json"));
            KdfParams k;
            k.salt = *salt_from_hex(doc["users"]["default"]["salt"].get<std::string>());
            return k;
        }();
        const KeyRing ring = derive_keyring("batch pipeline password", params);
        const EncryptionContext last_ctx(ring, FieldId("lastname"), 4);
        std::vector<std::string> tokens;
        for (const char* q : {"R", "Ro", "Ros", "Ross", "Ma", "Zan", "Leo", "Gre", "Qx"})
            tokens.push_back(make_query_token(last_ctx, q));
        p.queries = tokens.size();

        const auto schema = store::StoreSchema::load(schema_path);
        auto serve_and_query = [&](bool ingest) {
            store::RecordStore store(schema, dir / "data");
            store::StoreServer server(store);
            const int port = server.bind("127.0.0.1", 0);
            server.start();
            if (ingest) store::StoreClient("http://127.0.0.1:" + std::to_string(port)).ingest(records);
            httplib::Client raw("127.0.0.1", port);
            std::vector<std::string> answers;
            for (const auto& t : tokens) {
                const auto res = raw.Get("/v1/search", httplib::Params{{"field", "lastname"}, {"token", t}},
                                         httplib::Headers{});
                if (!res || res->status != 200) throw std::runtime_error("search request failed");
                answers.push_back(res->body);
                p.responses += res->body;
            }
            server.stop();
            return answers;
        };
        const auto before = serve_and_query(true);
        const auto after = serve_and_query(false);
        p.durable = before == after && before.front().size() > 20;
        p.persisted = [&] {
            std::ifstream in(dir / "data" / "records.jsonl");
            return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        }();
    } catch (const std::exception& e) {
        p.failure = e.what();
    }
    unsetenv("PREFIXSEAL_PASSWORD");
    fs::remove_all(dir);
    return p;
}

Outcome batch_pipeline() {
    const auto& p = pipeline();
    if (!p.failure.empty()) return {false, p.failure};
    const bool pass = p.rows == 10000 && p.encrypt_seconds < 60.0 && p.durable;
    return {pass, std::to_string(p.rows) + " rows encrypted and validated in " + fmt(p.encrypt_seconds) +
                      " s; " + std::to_string(p.queries) + " queries identical after restart: " +
                      (p.durable ? "yes" : "no")};
}

// Every 4-byte window of a text, sorted, for many-pattern substring lookup.
class SubstringIndex {
public:
    static constexpr std::size_t kWindow = 4;

    explicit SubstringIndex(std::string_view text) : text_(text) {
        for (std::size_t i = 0; i + kWindow <= text.size(); ++i) windows_.emplace_back(key(text.substr(i)), i);
        std::sort(windows_.begin(), windows_.end());
    }

    bool contains(std::string_view needle) const {
        if (needle.size() < kWindow) return text_.find(needle) != std::string_view::npos;
        const auto k = key(needle);
        auto it = std::lower_bound(windows_.begin(), windows_.end(), std::make_pair(k, std::size_t{0}));
        for (; it != windows_.end() && it->first == k; ++it)
            if (text_.substr(it->second, needle.size()) == needle) return true;
        return false;
    }

private:
    static std::uint32_t key(std::string_view s) {
        std::uint32_t k = 0;
        for (std::size_t i = 0; i < kWindow; ++i) k = (k << 8) | static_cast<unsigned char>(s[i]);
        return k;
    }

    std::string_view text_;
    std::vector<std::pair<std::uint32_t, std::size_t>> windows_;
};

Outcome zero_plaintext_server() {
    const auto& p = pipeline();
    if (!p.failure.empty()) return {false, p.failure};
    // Two scans. Quoted: any fixture value stored or returned as a whole
    // string. Raw: any occurrence at all, limited to values that cannot
    // turn up inside base64url by chance (8+ characters or a non-alphabet
    // character).
    const std::string haystack = p.persisted + p.responses;
    const SubstringIndex index(haystack);
    std::size_t quoted_hits = 0, raw_hits = 0, raw_checked = 0;
    std::set<std::string> distinct(p.fixture_values.begin(), p.fixture_values.end());
    for (const auto& v : distinct) {
        if (index.contains('"' + v + '"')) ++quoted_hits;
        const bool unambiguous = v.size() >= 8 || std::any_of(v.begin(), v.end(), [](char c) {
                                     return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_');
                                 });
        if (!unambiguous) continue;
        ++raw_checked;
        if (index.contains(v)) ++raw_hits;
    }
    const bool cities_visible = index.contains("\"San Marino\"");
    const bool pass = quoted_hits == 0 && raw_hits == 0 && cities_visible;
    return {pass, std::to_string(distinct.size()) + " fixture values over " + std::to_string(haystack.size()) +
                      " bytes: quoted hits " + std::to_string(quoted_hits) + ", raw hits " + std::to_string(raw_hits) +
                      " (" + std::to_string(raw_checked) + " values raw-scanned)"};
}

Outcome bench_report() {
    std::string out, err;
    if (cli_run({"bench", "--entries", "10000", "--pref-len", "3"}, out, err) != 0) return {false, err};
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);
    if (line != "operation,entries,seconds,ops_per_sec") return {false, "bad header: " + line};
    std::vector<std::string> ops;
    double cycle = -1;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string op, entries, seconds, rate;
        std::getline(cells, op, ',');
        std::getline(cells, entries, ',');
        std::getline(cells, seconds, ',');
        std::getline(cells, rate, ',');
        if (entries != "10000" || std::stod(rate) <= 0) return {false, "bad row: " + line};
        if (op == "cycle") cycle = std::stod(seconds);
        ops.push_back(op);
    }
    std::string empty_out;
    cli_run({"bench", "--entries", "0"}, empty_out, err);
    const bool pass = ops == std::vector<std::string>{"encrypt", "decrypt", "cycle"} && cycle >= 0 && cycle < 60.0 &&
                      empty_out == "operation,entries,seconds,ops_per_sec\n";
    return {pass, "encrypt/decrypt/cycle rows; full cycle of 10000 in " + fmt(cycle, 3) + " s"};
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"round_trip", round_trip},
        {"prefix_determinism", prefix_determinism},
        {"suffix_randomness", suffix_randomness},
        {"oracle_equivalence", oracle_equivalence},
        {"wrong_password_rejection", wrong_password_rejection},
        {"primitive_conformance", primitive_conformance},
        {"batch_pipeline", batch_pipeline},
        {"zero_plaintext_server", zero_plaintext_server},
        {"bench_report", bench_report},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    const int total = static_cast<int>(std::size(criteria));
    std::cout << (total - failed) << "/" << total << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
