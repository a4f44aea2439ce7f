#include "tabhash/bench.hpp"

#include "tabhash/rng.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tabhash {

namespace {

constexpr std::uint64_t kSaltBenchTables = 0x6265'6e63'6874'3031ULL;
constexpr std::uint64_t kSaltBenchKeys = 0x6265'6e63'686b'3032ULL;

struct TrialSample {
    double ns_per_hash = 0.0;
    std::uint32_t checksum = 0;
};

FamilyResult run_family(const BenchConfig& cfg, const HashFamily& fam,
                        std::size_t family_index) {
    const int q = fam.spec.q;
    const auto sizes = family_table_sizes(fam);

    FamilyResult res;
    res.family = fam.id;
    res.guaranteed_k = fam.guaranteed_k;
    res.lookups = fam.spec.d;
    for (auto s : sizes) res.table_bytes += s * sizeof(std::uint32_t);

    std::vector<double> per_trial(cfg.trials, 0.0);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t stream =
            (static_cast<std::uint64_t>(family_index) << 32) |
            static_cast<std::uint64_t>(trial);
        LookupTables tables =
            fill_tables_random(stream_seed(cfg.rng_seed, kSaltBenchTables,
                                           stream),
                               sizes, 32);
        Hasher h(fam.spec, std::move(tables));

        auto eng = make_engine(cfg.rng_seed, kSaltBenchKeys, stream);
        std::vector<std::uint32_t> flat(cfg.keys_per_trial *
                                        static_cast<std::uint64_t>(q));
        for (auto& c : flat)
            c = static_cast<std::uint32_t>(draw_bits(eng, fam.char_bits));

        std::uint32_t acc = 0;
        double elapsed_ns = 0.0;
        if (cfg.instrument) {
            std::vector<Key> keys(cfg.keys_per_trial);
            for (std::uint64_t i = 0; i < cfg.keys_per_trial; ++i) {
                keys[i].chars.resize(q);
                for (int r = 0; r < q; ++r)
                    keys[i].chars[r] = flat[i * q + r];
            }
            const auto t0 = std::chrono::steady_clock::now();
            for (int pass = 0; pass < cfg.passes; ++pass) {
                // Rotate between passes so repeated passes over the same
                // keys never cancel out of the checksum.
                acc = std::rotl(acc, 1);
                for (const Key& key : keys) {
                    acc ^= h.hash_counted(key, res.table_reads);
                    ++res.hashes_executed;
                }
            }
            const auto t1 = std::chrono::steady_clock::now();
            elapsed_ns = std::chrono::duration<double, std::nano>(t1 - t0)
                             .count();
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            for (int pass = 0; pass < cfg.passes; ++pass)
                acc = std::rotl(acc, 1) ^ h.checksum_stream(flat);
            const auto t1 = std::chrono::steady_clock::now();
            elapsed_ns = std::chrono::duration<double, std::nano>(t1 - t0)
                             .count();
        }
        res.checksum ^= acc;
        per_trial[trial] =
            elapsed_ns / (static_cast<double>(cfg.keys_per_trial) *
                          static_cast<double>(cfg.passes));
    }

    double sum = 0.0;
    for (double v : per_trial) sum += v;
    res.mean_ns = sum / cfg.trials;
    if (cfg.trials > 1) {
        double ss = 0.0;
        for (double v : per_trial) {
            const double dlt = v - res.mean_ns;
            ss += dlt * dlt;
        }
        res.sd_ns = std::sqrt(ss / (cfg.trials - 1));
    }
    return res;
}

} // namespace

std::uint32_t checksum_hash_stream(const Hasher& h,
                                   std::span<const Key> keys) {
    std::uint32_t acc = 0;
    for (const Key& key : keys) acc ^= h(key);
    return acc;
}

BenchReport run_benchmark(const BenchConfig& cfg) {
    if (cfg.trials < 1 || cfg.keys_per_trial < 1 || cfg.passes < 1)
        throw std::invalid_argument("bench: trials, keys, passes must be >= 1");
    if (cfg.families.empty())
        throw std::invalid_argument("bench: at least one family required");
    std::vector<HashFamily> fams;
    fams.reserve(cfg.families.size());
    for (const auto& id : cfg.families) fams.push_back(parse_family(id));

    BenchReport report;
    report.config = cfg;
    report.rows.resize(fams.size());
    if (cfg.parallel_families) {
        std::vector<std::thread> workers;
        workers.reserve(fams.size());
        for (std::size_t i = 0; i < fams.size(); ++i)
            workers.emplace_back([&, i] {
                report.rows[i] = run_family(cfg, fams[i], i);
            });
        for (auto& w : workers) w.join();
    } else {
        for (std::size_t i = 0; i < fams.size(); ++i)
            report.rows[i] = run_family(cfg, fams[i], i);
    }
    return report;
}

void write_csv(std::ostream& os, const BenchReport& report) {
    os << "family,guaranteed_k,mean_ns,sd_ns,lookups,table_bytes,"
          "machine_label\n";
    for (const auto& row : report.rows) {
        os << row.family << ',' << row.guaranteed_k << ',' << std::fixed
           << std::setprecision(4) << row.mean_ns << ',' << row.sd_ns
           << std::defaultfloat << ',' << row.lookups << ','
           << row.table_bytes << ',' << report.config.machine_label << '\n';
    }
}

void write_markdown(std::ostream& os, const BenchReport& report) {
    std::multimap<int, const FamilyResult*> grouped;
    for (const auto& row : report.rows) grouped.emplace(row.guaranteed_k, &row);
    os << "| guaranteed k | function | mean (ns) | SD (ns) | lookups | "
          "table bytes |\n";
    os << "|---|---|---|---|---|---|\n";
    int last_k = -1;
    for (const auto& [k, row] : grouped) {
        os << "| ";
        if (k != last_k) os << k;
        last_k = k;
        os << " | " << row->family << " | " << std::fixed
           << std::setprecision(2) << row->mean_ns << " | "
           << std::setprecision(4) << row->sd_ns << std::defaultfloat
           << " | " << row->lookups << " | " << row->table_bytes << " |\n";
    }
}

BenchConfig parse_bench_config(std::istream& is) {
    BenchConfig cfg;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bench config line " +
                                    std::to_string(lineno) + ": " + why);
    };
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail("expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (value.empty()) fail("empty value for '" + key + "'");
        auto to_u64 = [&](const std::string& v) {
            std::uint64_t out{};
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc() || p != v.data() + v.size())
                fail("cannot parse integer '" + v + "' for '" + key + "'");
            return out;
        };
        auto to_count = [&](const std::string& v) {
            const std::uint64_t out = to_u64(v);
            if (out < 1 || out > 1'000'000)
                fail("'" + key + "' must be in [1, 1000000]");
            return static_cast<int>(out);
        };
        auto to_bool = [&](const std::string& v) {
            if (v == "1" || v == "true") return true;
            if (v == "0" || v == "false") return false;
            fail("'" + key + "' must be 0/1/true/false");
            return false;
        };
        if (key == "trials") {
            cfg.trials = to_count(value);
        } else if (key == "keys") {
            cfg.keys_per_trial = to_u64(value);
            if (cfg.keys_per_trial < 1) fail("keys must be >= 1");
        } else if (key == "passes") {
            cfg.passes = to_count(value);
        } else if (key == "families") {
            cfg.families.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) cfg.families.push_back(item);
            }
            if (cfg.families.empty()) fail("families list is empty");
        } else if (key == "seed") {
            cfg.rng_seed = to_u64(value);
        } else if (key == "machine") {
            cfg.machine_label = value;
        } else if (key == "parallel") {
            cfg.parallel_families = to_bool(value);
        } else if (key == "instrument") {
            cfg.instrument = to_bool(value);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    return cfg;
}

} // namespace tabhash
