#include "prefixseal/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "prefixseal/cli/batch.hpp"
#include "prefixseal/cli/names.hpp"
#include "prefixseal/cli/password.hpp"
#include "prefixseal/field_cipher.hpp"
#include "prefixseal/prefix_search.hpp"
#include "prefixseal/store/http_service.hpp"
#include "prefixseal/store/store_client.hpp"

namespace prefixseal::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingPassword:
    case ErrorCode::EmptyPassword:
    case ErrorCode::EmptyTerm:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidContext:
        return 2;
    case ErrorCode::AuthenticationFailed:
    case ErrorCode::WrongPassword:
        return 3;
    case ErrorCode::MalformedCiphertext:
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidText:
        return 4;
    default:
        return 1;
    }
}

std::vector<BenchRow> run_bench(const KeyRing& ring, std::size_t entries, unsigned pref_len,
                                std::size_t token_width) {
    if (entries == 0) return {};
    const EncryptionContext ctx(ring, FieldId("bench"), pref_len, token_width);
    const auto names = synthetic_names(entries, 2024);
    using Clock = std::chrono::steady_clock;
    auto seconds_since = [](Clock::time_point t0) {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    };

    std::vector<std::string> sealed(entries);
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < entries; ++i) sealed[i] = encrypt_text(ctx, names[i]);
    const double enc = seconds_since(t0);

    std::size_t sink = 0;
    t0 = Clock::now();
    for (const auto& ct : sealed) sink += decrypt_text(ctx, ct).size();
    const double dec = seconds_since(t0);

    t0 = Clock::now();
    for (const auto& name : names)
        if (decrypt_text(ctx, encrypt_text(ctx, name)) != normalize(name))
            throw Error(ErrorCode::ValidationFailed, "benchmark round trip mismatch");
    const double cycle = seconds_since(t0);
    if (sink == 0) throw Error(ErrorCode::ValidationFailed, "benchmark decrypted nothing");

    return {{"encrypt", entries, enc}, {"decrypt", entries, dec}, {"cycle", entries, cycle}};
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "operation,entries,seconds,ops_per_sec\n";
    for (const auto& r : rows) {
        const double rate = r.seconds > 0 ? static_cast<double>(r.entries) / r.seconds : 0.0;
        out << r.operation << ',' << r.entries << ',' << std::fixed << std::setprecision(6) << r.seconds << ','
            << std::setprecision(1) << rate << '\n';
    }
    out << std::defaultfloat;
}

namespace {

using nlohmann::json;

struct Globals {
    std::string server;
    std::string material = "prefixseal-material.json";
    std::string user = "default";
    std::uint32_t kdf_memory = 65536;
    std::uint32_t kdf_time = 3;
    std::uint32_t kdf_parallelism = 1;
    std::size_t token_width = kDefaultTokenWidth;
};

// What a user needs besides the password: KDF profile, salt, check-words.
struct Material {
    KdfParams params;
    CheckWordSet words;
};

KdfParams params_from_flags(const Globals& g) {
    KdfParams p;
    p.memory_cost_kib = g.kdf_memory;
    p.time_cost = g.kdf_time;
    p.parallelism = g.kdf_parallelism;
    return p;
}

json read_material_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return json{{"users", json::object()}};
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("users") || !doc["users"].is_object())
        throw Error(ErrorCode::IoError, "key material file " + path + " is corrupt");
    return doc;
}

// Local files record the KDF profile used at init; the server only keeps salt
// and check-words, so remote users pass the profile as flags.
Material load_material(const Globals& g) {
    Material m;
    m.params = params_from_flags(g);
    if (!g.server.empty()) {
        store::StoreClient client(g.server);
        m.params.salt = client.get_salt(g.user);
        m.words = client.get_checkwords(g.user);
        return m;
    }
    if (!std::filesystem::exists(g.material))
        throw Error(ErrorCode::IoError, "no key material at " + g.material + "; run init first");
    const json doc = read_material_file(g.material);
    const auto& users = doc["users"];
    if (!users.contains(g.user)) throw Error(ErrorCode::UnknownUser, g.user);
    try {
        const json& u = users[g.user];
        const auto salt = salt_from_hex(u.at("salt").get<std::string>());
        if (!salt) throw Error(ErrorCode::InvalidSalt, "bad salt in " + g.material);
        m.params.salt = *salt;
        const json& kdf = u.at("kdf");
        m.params.memory_cost_kib = kdf.at("memory_kib").get<std::uint32_t>();
        m.params.time_cost = kdf.at("time").get<std::uint32_t>();
        m.params.parallelism = kdf.at("parallelism").get<std::uint32_t>();
        m.words.words = u.at("words").get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::IoError, "key material file " + g.material + " is corrupt");
    }
    return m;
}

void save_material(const Globals& g, const Material& m) {
    if (!g.server.empty()) {
        store::StoreClient client(g.server);
        client.put_salt(g.user, m.params.salt);
        client.put_checkwords(g.user, m.words);
        return;
    }
    json doc = read_material_file(g.material);
    doc["users"][g.user] = {
        {"salt", salt_to_hex(m.params.salt)},
        {"kdf",
         {{"memory_kib", m.params.memory_cost_kib}, {"time", m.params.time_cost}, {"parallelism", m.params.parallelism}}},
        {"words", m.words.words},
    };
    const std::filesystem::path target(g.material);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << doc.dump(2) << '\n';
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

KeyRing derive_from_prompt(const KdfParams& params) {
    std::string password = obtain_password();
    std::string pepper = obtain_pepper();
    KeyRing ring = derive_keyring(password, params, pepper);
    secure_wipe(password.data(), password.size());
    secure_wipe(pepper.data(), pepper.size());
    return ring;
}

// Every key-deriving command checks the password before touching data.
KeyRing unlock(const Globals& g) {
    const Material m = load_material(g);
    m.params.validate();
    KeyRing ring = derive_from_prompt(m.params);
    if (!verify_password(ring, m.words)) throw Error(ErrorCode::WrongPassword, "password does not open the check-words");
    return ring;
}

// "-" reads the value from stdin so it stays out of the process list.
std::string argument_or_stdin(const std::string& value) {
    if (value != "-") return value;
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

struct FieldArgs {
    std::string field;
    std::string schema;
    unsigned pref_len = 0;
    CLI::Option* pref_len_opt = nullptr;
};

void add_field_args(CLI::App* cmd, FieldArgs& a, bool field_required = true) {
    auto* f = cmd->add_option("--field", a.field, "Field identifier");
    if (field_required) f->required();
    cmd->add_option("--schema", a.schema, "Store schema JSON giving pref_len and token width");
    a.pref_len_opt = cmd->add_option("--pref-len", a.pref_len, "Prefix length in characters")
                         ->check(CLI::Range(0u, kMaxPrefixLength));
}

store::FieldSpec resolve_field(const FieldArgs& a, const Globals& g) {
    if (!a.schema.empty()) {
        const auto schema = store::StoreSchema::load(a.schema, g.token_width);
        const auto* spec = schema.find(a.field);
        if (spec == nullptr) throw Error(ErrorCode::UnknownField, a.field);
        if (!spec->encrypted) throw Error(ErrorCode::NotEncryptedField, a.field);
        if (a.pref_len_opt->count() > 0 && a.pref_len != spec->pref_len)
            throw Error(ErrorCode::InvalidContext, "--pref-len disagrees with the schema");
        return *spec;
    }
    if (a.pref_len_opt->count() == 0) throw Error(ErrorCode::InvalidContext, "pass --pref-len or --schema");
    return store::FieldSpec{true, a.pref_len, g.token_width};
}

std::vector<store::StoredRecord> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::vector<store::StoredRecord> out;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        try {
            out.push_back(store::record_from_json(json::parse(line)));
        } catch (const json::exception&) {
            throw Error(ErrorCode::SchemaViolation, "bad JSON line in " + path.string());
        }
    }
    return out;
}

void cmd_init(const Globals& g, std::ostream& out) {
    Material m;
    m.params = params_from_flags(g);
    m.params.salt = generate_salt();
    m.params.validate();
    const KeyRing ring = derive_from_prompt(m.params);
    m.words = make_check_words(ring);
    save_material(g, m);
    out << "initialized user " << g.user << " (" << (g.server.empty() ? g.material : g.server) << ")\n";
}

void cmd_encrypt(const Globals& g, const FieldArgs& a, const std::string& text, std::ostream& out) {
    const auto spec = resolve_field(a, g);
    const KeyRing ring = unlock(g);
    const EncryptionContext ctx(ring, FieldId(a.field), spec.pref_len, spec.token_width);
    out << encrypt_text(ctx, argument_or_stdin(text)) << '\n';
}

void cmd_decrypt(const Globals& g, const FieldArgs& a, const std::string& ciphertext, std::ostream& out) {
    // The body key and token width are all decryption needs; the field and
    // prefix length only satisfy the context constructor.
    std::size_t width = g.token_width;
    if (!a.schema.empty() && !a.field.empty()) width = resolve_field(a, g).token_width;
    const KeyRing ring = unlock(g);
    const EncryptionContext ctx(ring, FieldId(a.field.empty() ? "field" : a.field), 0, width);
    out << decrypt_text(ctx, argument_or_stdin(ciphertext)) << '\n';
}

void cmd_token(const Globals& g, const FieldArgs& a, const std::string& term, std::ostream& out) {
    const auto spec = resolve_field(a, g);
    const KeyRing ring = unlock(g);
    const EncryptionContext ctx(ring, FieldId(a.field), spec.pref_len, spec.token_width);
    out << make_query_token(ctx, argument_or_stdin(term)) << '\n';
}

struct FileArgs {
    std::string schema;
    std::string input;
    std::string output;
    std::size_t threads = 0;
    bool ingest = false;
};

void cmd_encrypt_file(const Globals& g, const FileArgs& a, std::ostream& out) {
    const auto schema = store::StoreSchema::load(a.schema, g.token_width);
    const KeyRing ring = unlock(g);
    BatchOptions options;
    options.threads = a.threads;
    // Fault injection for the end-to-end tests: corrupts one row's first
    // encrypted cell after encryption so validation must catch it.
    if (const char* fault = std::getenv("PREFIXSEAL_TEST_CORRUPT_ROW")) {
        const std::size_t bad_row = std::strtoull(fault, nullptr, 10);
        options.tamper = [bad_row](std::size_t row, const std::string&, std::string& ct) {
            if (row == bad_row && !ct.empty()) ct.back() = ct.back() == 'A' ? 'B' : 'A';
        };
    }
    const std::size_t n = encrypt_file(a.input, a.output, schema, ring, options);
    out << "wrote " << n << " records to " << a.output << '\n';
    if (a.ingest) {
        if (g.server.empty()) throw Error(ErrorCode::InvalidContext, "--ingest needs --server");
        store::StoreClient client(g.server);
        out << "ingested " << client.ingest(read_jsonl(a.output)) << " records\n";
    }
}

struct SearchArgs {
    FieldArgs field;
    std::string term;
    std::string records;
};

void cmd_search(const Globals& g, const SearchArgs& a, std::ostream& out, std::ostream& err) {
    const auto spec = resolve_field(a.field, g);
    if (g.server.empty() && a.records.empty()) throw Error(ErrorCode::InvalidContext, "pass --server or --records");
    const KeyRing ring = unlock(g);
    const EncryptionContext ctx(ring, FieldId(a.field.field), spec.pref_len, spec.token_width);
    const std::string token = make_query_token(ctx, a.term);

    std::vector<store::StoredRecord> candidates;
    if (!g.server.empty()) {
        candidates = store::StoreClient(g.server).search(a.field.field, token);
    } else {
        for (auto& rec : read_jsonl(a.records)) {
            const auto it = rec.fields.find(a.field.field);
            if (it != rec.fields.end() && match_prefix(it->second, token)) candidates.push_back(std::move(rec));
        }
    }

    std::optional<store::StoreSchema> schema;
    if (!a.field.schema.empty()) schema = store::StoreSchema::load(a.field.schema, g.token_width);
    std::map<std::string, std::unique_ptr<EncryptionContext>> other_contexts;
    auto context_for = [&](const std::string& name) -> const EncryptionContext* {
        if (name == a.field.field) return &ctx;
        if (!schema) return nullptr;
        const auto* s = schema->find(name);
        if (s == nullptr || !s->encrypted) return nullptr;
        auto& slot = other_contexts[name];
        if (!slot) slot = std::make_unique<EncryptionContext>(ring, FieldId(name), s->pref_len, s->token_width);
        return slot.get();
    };

    // Tags of short tokens can collide; the server answer is a superset, so
    // the full term is checked again on plaintext.
    const std::string wanted = normalize(a.term);
    std::size_t matches = 0;
    for (const auto& rec : candidates) {
        const auto it = rec.fields.find(a.field.field);
        if (it == rec.fields.end()) continue;
        std::string plain;
        try {
            plain = decrypt_text(ctx, it->second);
        } catch (const Error&) {
            continue; // sealed under someone else's keys
        }
        if (!plain.starts_with(wanted)) continue;
        json fields = json::object();
        for (const auto& [name, value] : rec.fields) {
            const EncryptionContext* c = context_for(name);
            if (c == nullptr) {
                fields[name] = value;
                continue;
            }
            try {
                fields[name] = name == a.field.field ? plain : decrypt_text(*c, value);
            } catch (const Error&) {
                fields[name] = value;
            }
        }
        out << json{{"id", rec.id}, {"fields", fields}}.dump() << '\n';
        ++matches;
    }
    err << matches << " match(es) from " << candidates.size() << " candidate(s)\n";
}

struct ServeArgs {
    std::string data;
    std::string schema;
    std::string host = "127.0.0.1";
    int port = 8080;
};

void cmd_serve(const Globals& g, const ServeArgs& a, std::ostream& out) {
    std::filesystem::create_directories(a.data);
    store::RecordStore store(store::StoreSchema::load(a.schema, g.token_width), a.data);
    store::StoreServer server(store);

    // Block the stop signals before the listener thread exists so only
    // sigwait below ever sees them.
    sigset_t stop_set;
    sigemptyset(&stop_set);
    sigaddset(&stop_set, SIGINT);
    sigaddset(&stop_set, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &stop_set, &previous);

    const int port = server.bind(a.host, a.port);
    server.start();
    out << "listening on http://" << a.host << ':' << port << " (" << store.size() << " records)" << std::endl;
    int signal_number = 0;
    sigwait(&stop_set, &signal_number);
    server.stop();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    out << "stopped" << std::endl;
}

void cmd_bench(const Globals& g, std::size_t entries, unsigned pref_len, std::ostream& out) {
    // Throughput of the field layer only; a random master key stands in for
    // the password so no KDF time is measured.
    SecretKey master;
    random_bytes(master.span());
    const KeyRing ring = derive_subkeys(master);
    write_bench_csv(out, run_bench(ring, entries, pref_len, g.token_width));
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Client-side field encryption with prefix search over an untrusting store", "prefixseal"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--server", g.server, "Record store base URL, e.g. http://127.0.0.1:8080");
    app.add_option("--material", g.material, "Local key material file used without --server")
        ->capture_default_str();
    app.add_option("--user", g.user, "User name for salt and check-words")->capture_default_str();
    app.add_option("--kdf-memory", g.kdf_memory, "Argon2id memory in KiB")->capture_default_str();
    app.add_option("--kdf-time", g.kdf_time, "Argon2id passes")->capture_default_str();
    app.add_option("--kdf-parallelism", g.kdf_parallelism, "Argon2id lanes")->capture_default_str();
    app.add_option("--token-width", g.token_width, "Prefix tag width in bytes")
        ->check(CLI::Range(std::size_t{1}, kMaxTokenWidth))
        ->capture_default_str();

    auto* init = app.add_subcommand("init", "Create salt and check-words for a user");

    FieldArgs enc_field;
    std::string enc_text;
    auto* enc = app.add_subcommand("encrypt", "Encrypt one value");
    add_field_args(enc, enc_field);
    enc->add_option("text", enc_text, "Plaintext, or - for stdin")->required();

    FieldArgs dec_field;
    std::string dec_text;
    auto* dec = app.add_subcommand("decrypt", "Decrypt one value");
    add_field_args(dec, dec_field, false);
    dec->add_option("ciphertext", dec_text, "Serialized ciphertext, or - for stdin")->required();

    FileArgs file_args;
    auto* file = app.add_subcommand("encrypt-file", "Encrypt a CSV file into JSON lines");
    file->add_option("--schema", file_args.schema, "Store schema JSON")->required()->check(CLI::ExistingFile);
    file->add_option("--input", file_args.input, "CSV input with a header row")->required()->check(CLI::ExistingFile);
    file->add_option("--output", file_args.output, "JSON lines output")->required();
    file->add_option("--threads", file_args.threads, "Worker threads (0 = all cores)");
    file->add_flag("--ingest", file_args.ingest, "Also upload the records to --server");

    FieldArgs tok_field;
    std::string tok_term;
    auto* tok = app.add_subcommand("token", "Print the query token for a search term");
    add_field_args(tok, tok_field);
    tok->add_option("term", tok_term, "Search term, or - for stdin")->required();

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "Prefix search and decrypt matching records");
    add_field_args(search, search_args.field);
    search->add_option("term", search_args.term, "Search term")->required();
    search->add_option("--records", search_args.records, "Search a local JSON lines file instead of --server");

    ServeArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Run the record store");
    serve->add_option("--data", serve_args.data, "Data directory")->required();
    serve->add_option("--schema", serve_args.schema, "Store schema JSON")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", serve_args.host)->capture_default_str();
    serve->add_option("--port", serve_args.port, "0 picks a free port")->capture_default_str();

    std::size_t bench_entries = 1000;
    unsigned bench_pref_len = 3;
    auto* bench = app.add_subcommand("bench", "Encryption throughput as CSV");
    bench->add_option("--entries", bench_entries)->capture_default_str();
    bench->add_option("--pref-len", bench_pref_len)->check(CLI::Range(0u, kMaxPrefixLength))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*init) cmd_init(g, out);
        else if (*enc) cmd_encrypt(g, enc_field, enc_text, out);
        else if (*dec) cmd_decrypt(g, dec_field, dec_text, out);
        else if (*file) cmd_encrypt_file(g, file_args, out);
        else if (*tok) cmd_token(g, tok_field, tok_term, out);
        else if (*search) cmd_search(g, search_args, out, err);
        else if (*serve) cmd_serve(g, serve_args, out);
        else if (*bench) cmd_bench(g, bench_entries, bench_pref_len, out);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: IoError: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace prefixseal::cli
