// Command-line front end: hashing, independence analysis, bad-arrangement
// search and construction, arrangement verification, bounded k_max, and the
// timing benchmark.
//
// Exit codes: 0 success; 1 witness found (search) or arrangement not bad
// (verify); 2 usage or input error; 3 search budget exceeded.

#include "tabhash/arrangement.hpp"
#include "tabhash/bench.hpp"
#include "tabhash/family.hpp"
#include "tabhash/independence.hpp"
#include "tabhash/search.hpp"
#include "tabhash/tables.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace tabhash;

constexpr int kExitOk = 0;
constexpr int kExitWitness = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

// Open `path` for reading, with "-" meaning standard input.
std::istream& open_input(const std::string& path, std::ifstream& file) {
    if (path == "-") return std::cin;
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot open input file '" + path + "'");
    return file;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path == "-") return std::cout;
    file.open(path);
    if (!file)
        throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

// Key files: one key per line, q space-separated decimal integers. Blank
// lines and lines starting with '#' are ignored.
std::vector<Key> read_keys(std::istream& is, int q) {
    std::vector<Key> keys;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        std::istringstream ls(line);
        Key key;
        key.chars.resize(q);
        for (int r = 0; r < q; ++r) {
            if (!(ls >> key.chars[r]))
                throw std::runtime_error(
                    "malformed key file: line " + std::to_string(lineno) +
                    ": expected " + std::to_string(q) +
                    " space-separated integers");
        }
        std::string extra;
        if (ls >> extra)
            throw std::runtime_error(
                "malformed key file: line " + std::to_string(lineno) +
                ": trailing characters after " + std::to_string(q) +
                " integers");
        keys.push_back(std::move(key));
    }
    if (keys.empty()) throw std::runtime_error("key file contains no keys");
    return keys;
}

std::string key_str(const Key& key) {
    std::string s = "(";
    for (std::size_t i = 0; i < key.chars.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(key.chars[i]);
    }
    return s + ")";
}

int run_hash(const std::string& family, std::uint64_t seed,
             const std::string& keys_path, int ell) {
    const HashFamily fam = parse_family(family);
    std::ifstream file;
    const auto keys = read_keys(open_input(keys_path, file), fam.spec.q);
    Hasher h(fam.spec,
             fill_tables_random(seed, family_table_sizes(fam), ell));
    for (const Key& key : keys) std::cout << h(key) << '\n';
    return kExitOk;
}

int run_analyze(const std::string& family, const std::string& keys_path) {
    const HashFamily fam = parse_family(family);
    std::ifstream file;
    const auto keys = read_keys(open_input(keys_path, file), fam.spec.q);
    const IndependenceVerdict v = is_independent_set(fam.spec, keys);
    std::cout << "family: " << fam.id << "\nkeys: " << keys.size()
              << "\nused cells: " << v.used_cells << "\nrank: " << v.rank
              << "\n";
    if (v.independent) {
        std::cout << "verdict: independent (incidence matrix has full row "
                     "rank; these keys hash independently under any "
                  << keys.size() << "-wise table fill)\n";
    } else {
        std::cout << "verdict: DEPENDENT (rank deficit "
                  << keys.size() - v.rank << ")\n";
        const auto& rows = *v.witness_rows;
        std::cout << "forced relation: h" << key_str(keys[rows.back()])
                  << " =";
        for (std::size_t i = 0; i + 1 < rows.size(); ++i)
            std::cout << (i ? " ^ h" : " h") << key_str(keys[rows[i]]);
        std::cout << "  (holds under every table fill)\n";
    }
    return kExitOk;
}

int run_search(const std::string& family, std::int64_t n, int k,
               std::uint64_t budget, bool serial,
               const std::string& cache_path) {
    const HashFamily fam = parse_family(family);
    SearchResult res;
    if (serial) {
        res = find_bad_arrangement_serial(fam.spec, n, k, budget);
    } else {
        SearchOptions opt;
        opt.budget = budget;
        std::optional<SearchCache> cache;
        if (!cache_path.empty()) {
            cache.emplace(cache_path);
            opt.cache = &*cache;
            opt.cache_key = fam.id;
        }
        res = find_bad_arrangement(fam.spec, n, k, opt);
    }
    if (!res.witness) {
        std::cout << "no bad arrangement: every " << k << "-subset of ["
                  << n << "]^" << fam.spec.q << " is independent under "
                  << fam.id << " (exhaustive, " << res.nodes << " nodes)\n";
        return kExitOk;
    }
    Arrangement arr;
    arr.q = fam.spec.q;
    arr.d = fam.spec.d;
    arr.keys = *res.witness;
    if (fam.spec.variant == Variant::curve && !verify_bad(arr))
        throw std::logic_error("internal error: search witness failed "
                               "re-verification");
    std::cerr << "bad arrangement found: " << k << " keys in [" << n << "]^"
              << fam.spec.q << " are dependent under " << fam.id << " ("
              << res.nodes << " nodes"
              << (res.from_cache ? ", cached" : "") << ")\n";
    if (fam.spec.variant != Variant::curve)
        std::cerr << "note: " << fam.id << " is not a curve family; "
                     "re-check this witness with 'analyze', not 'verify'\n";
    std::cout << "# family " << fam.id << ", universe [" << n << "]^"
              << fam.spec.q << '\n';
    write_arrangement(std::cout, arr);
    return kExitWitness;
}

int run_construct(int d, const std::string& out_path) {
    const Arrangement arr = construct_bad_arrangement(d);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);
    os << "# bad (2," << d << "," << arr.keys.size() << ")-arrangement\n";
    write_arrangement(os, arr);
    return kExitOk;
}

int run_verify(const std::string& path) {
    std::ifstream file;
    const Arrangement arr = read_arrangement(open_input(path, file));
    if (verify_bad(arr)) {
        std::cout << "BAD on columns 0.." << arr.d - 1 << " ("
                  << arr.keys.size() << " keys, q=" << arr.q << ")\n";
        return kExitOk;
    }
    // Name one offending column for the refusal message.
    for (int z = 0; z < arr.d; ++z) {
        std::map<std::int64_t, int> classes;
        for (const Key& key : arr.keys) ++classes[curve_value(key, z)];
        for (const auto& [value, count] : classes) {
            if (count % 2 != 0) {
                std::cout << "NOT BAD: column " << z << " has an odd class "
                          << "(value " << value << " occurs " << count
                          << " time" << (count == 1 ? "" : "s") << ")\n";
                return kExitWitness;
            }
        }
    }
    std::cout << "NOT BAD\n";
    return kExitWitness;
}

int run_kmax(const std::string& family, std::int64_t n, int limit,
             std::uint64_t budget, const std::string& cache_path) {
    const HashFamily fam = parse_family(family);
    SearchOptions opt;
    opt.budget = budget;
    std::optional<SearchCache> cache;
    if (!cache_path.empty()) {
        cache.emplace(cache_path);
        opt.cache = &*cache;
        opt.cache_key = fam.id;
    }
    const int kmax = k_max_bounded(fam.spec, n, limit, opt);
    if (kmax < limit) {
        std::cout << "k_max = " << kmax << " for " << fam.id
                  << ": a dependent set of size " << kmax + 1
                  << " exists in [" << n << "]^" << fam.spec.q
                  << " (a refutation holds in every universe containing its "
                     "keys)\n";
    } else {
        std::cout << "k_max >= " << limit << " for " << fam.id << " over ["
                  << n << "]^" << fam.spec.q
                  << ": no dependent set of size <= " << limit
                  << " in this bounded universe (exhaustive here; a larger "
                     "universe may still contain one, so this bound is "
                     "final only for [" << n << "]^" << fam.spec.q << ")\n";
    }
    return kExitOk;
}

struct BenchCliOverrides {
    std::optional<int> trials, passes;
    std::optional<std::uint64_t> keys, seed;
    std::optional<std::string> families, machine;
    bool instrument = false;
    bool parallel = false;
};

int run_bench(const std::string& config_path, const std::string& csv_path,
              const std::string& md_path, const BenchCliOverrides& ov) {
    BenchConfig cfg;
    if (!config_path.empty()) {
        std::ifstream file;
        cfg = parse_bench_config(open_input(config_path, file));
    }
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.passes) cfg.passes = *ov.passes;
    if (ov.keys) cfg.keys_per_trial = *ov.keys;
    if (ov.seed) cfg.rng_seed = *ov.seed;
    if (ov.machine) cfg.machine_label = *ov.machine;
    if (ov.instrument) cfg.instrument = true;
    if (ov.parallel) cfg.parallel_families = true;
    if (ov.families) {
        cfg.families.clear();
        std::stringstream ss(*ov.families);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) cfg.families.push_back(item);
        if (cfg.families.empty())
            throw std::runtime_error("--families list is empty");
    }

    const BenchReport report = run_benchmark(cfg);

    if (!csv_path.empty()) {
        std::ofstream file;
        write_csv(open_output(csv_path, file), report);
    }
    if (!md_path.empty()) {
        std::ofstream file;
        write_markdown(open_output(md_path, file), report);
    }
    if (csv_path.empty() && md_path.empty()) write_csv(std::cout, report);
    if (cfg.instrument) {
        for (const auto& row : report.rows)
            std::cerr << "instrumented " << row.family << ": "
                      << row.hashes_executed << " evaluations, "
                      << row.table_reads << " table reads ("
                      << (row.hashes_executed
                              ? static_cast<double>(row.table_reads) /
                                    static_cast<double>(row.hashes_executed)
                              : 0.0)
                      << " per key)\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabulation-based hashing: evaluation, independence "
                 "analysis, dependency search, and benchmarks"};
    app.require_subcommand(1);

    std::string family, keys_path = "-", out_path = "-", arr_path;
    std::string cache_path, config_path, csv_path, md_path;
    std::uint64_t seed = 1, budget = kDefaultSearchBudget;
    std::int64_t n = 0;
    int k = 0, ell = 32, d = 0, limit = 0;
    bool serial = false;
    BenchCliOverrides ov;
    int rc = kExitOk;

    auto* hash = app.add_subcommand(
        "hash", "Hash keys read from a file (or - for stdin), one per line");
    hash->add_option("--family", family, "family id: " + family_grammar())
        ->required();
    hash->add_option("--seed", seed, "64-bit table-fill seed")->required();
    hash->add_option("--keys", keys_path, "key file, - for stdin")
        ->required();
    hash->add_option("--ell", ell, "hash output bits (default 32)")
        ->check(CLI::Range(1, 32));
    hash->callback([&] { rc = run_hash(family, seed, keys_path, ell); });

    auto* analyze = app.add_subcommand(
        "analyze",
        "Rank-test a key set: independent, or dependent with the forced "
        "XOR relation");
    analyze->add_option("--family", family, "family id: " + family_grammar())
        ->required();
    analyze->add_option("--keys", keys_path, "key file, - for stdin")
        ->required();
    analyze->callback([&] { rc = run_analyze(family, keys_path); });

    auto* search = app.add_subcommand(
        "search",
        "Exhaustively look for k keys in [n]^q that are dependent; writes "
        "any witness in arrangement format (exit 1 when found)");
    search->add_option("--family", family, "family id: " + family_grammar())
        ->required();
    search->add_option("-n", n, "characters range over [n] = {0..n-1}")
        ->required()
        ->check(CLI::PositiveNumber);
    search->add_option("-k", k, "arrangement size to look for")
        ->required()
        ->check(CLI::PositiveNumber);
    search->add_option("--budget", budget,
                       "max subsets to enumerate before giving up");
    search->add_flag("--serial", serial,
                     "use the unpruned serial reference kernel");
    search->add_option("--cache", cache_path,
                       "path of a verdict cache file to reuse and extend");
    search->callback(
        [&] { rc = run_search(family, n, k, budget, serial, cache_path); });

    auto* construct = app.add_subcommand(
        "construct",
        "Emit the constructive bad (2,d,2^d)-arrangement for column count d");
    construct->add_option("-d", d, "column count (1..12)")->required();
    construct->add_option("--out", out_path, "output file, - for stdout");
    construct->callback([&] { rc = run_construct(d, out_path); });

    auto* verify = app.add_subcommand(
        "verify",
        "Check an arrangement file: BAD (every column splits into even "
        "classes, exit 0) or NOT BAD (exit 1)");
    verify->add_option("file", arr_path, "arrangement file, - for stdin")
        ->required();
    verify->callback([&] { rc = run_verify(arr_path); });

    auto* kmax = app.add_subcommand(
        "kmax",
        "Largest k <= limit with no dependent k-subset inside [n]^q");
    kmax->add_option("--family", family, "family id: " + family_grammar())
        ->required();
    kmax->add_option("-n", n, "characters range over [n]")
        ->required()
        ->check(CLI::PositiveNumber);
    kmax->add_option("--limit", limit, "largest size to try")
        ->required()
        ->check(CLI::PositiveNumber);
    kmax->add_option("--budget", budget,
                     "max subsets to enumerate before giving up");
    kmax->add_option("--cache", cache_path,
                     "path of a verdict cache file to reuse and extend");
    kmax->callback(
        [&] { rc = run_kmax(family, n, limit, budget, cache_path); });

    auto* bench = app.add_subcommand(
        "bench",
        "Timing protocol: per family and trial, fill tables, draw keys, "
        "hash the array `passes` times; report mean/SD ns per hash as CSV");
    bench->add_option("--config", config_path,
                      "key=value config file (trials, keys, passes, "
                      "families, seed, machine, parallel, instrument)");
    bench->add_option("--csv", csv_path, "write CSV here instead of stdout");
    bench->add_option("--markdown", md_path,
                      "also write a grouped markdown table (- for stdout)");
    bench->add_option("--trials", ov.trials, "override: trial count");
    bench->add_option("--keys", ov.keys, "override: keys per trial");
    bench->add_option("--passes", ov.passes, "override: passes per trial");
    bench->add_option("--families", ov.families,
                      "override: comma-separated family ids");
    bench->add_option("--seed", ov.seed, "override: master seed");
    bench->add_option("--machine", ov.machine, "override: machine label");
    bench->add_flag("--instrument", ov.instrument,
                    "count evaluations and table reads (slower, exact)");
    bench->add_flag("--parallel", ov.parallel,
                    "run families on dedicated threads");
    bench->callback(
        [&] { rc = run_bench(config_path, csv_path, md_path, ov); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const tabhash::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory (are the family's tables too "
                     "large?)\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return rc;
}
