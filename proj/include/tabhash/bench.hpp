#pragma once

#include "tabhash/family.hpp"
#include "tabhash/tables.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tabhash {

struct BenchConfig {
    int trials = 30;
    std::uint64_t keys_per_trial = 1'000'000;
    int passes = 10;
    std::vector<std::string> families = {"curve2_4", "tz2_6", "tz4_16", "tz5",
                                         "id"};
    std::uint64_t rng_seed = 0x7461626265636831ULL;
    std::string machine_label = "unknown";
    // Timing runs single-threaded by default; opting in runs each family on
    // its own thread with its own timer.
    bool parallel_families = false;
    // Instrumented runs count every hash evaluation and table read instead
    // of using the tight stream kernel; timings are still reported but are
    // dominated by the counting overhead.
    bool instrument = false;
};

struct FamilyResult {
    std::string family;
    int guaranteed_k = 0;
    double mean_ns = 0.0; // mean time per hash application across trials
    double sd_ns = 0.0;   // sample standard deviation across trials
    int lookups = 0;      // table reads per hash = d
    std::uint64_t table_bytes = 0;
    // Rotate-XOR fold of every hash value (anti-optimization sink; a plain
    // XOR would cancel to zero over an even number of passes).
    std::uint32_t checksum = 0;
    // Instrumented counters (zero unless cfg.instrument):
    std::uint64_t hashes_executed = 0;
    std::uint64_t table_reads = 0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<FamilyResult> rows; // one per configured family, same order
};

// XOR-fold of the hash values of a key stream. Deterministic for fixed
// tables and keys; an empty stream folds to 0.
std::uint32_t checksum_hash_stream(const Hasher& h, std::span<const Key> keys);

// For each family and trial: fill the tables from the trial's stream, draw
// the key array from a sibling stream, hash every key `passes` times into an
// XOR checksum, and record wall time / (keys * passes). Reports mean and
// sample standard deviation across trials.
BenchReport run_benchmark(const BenchConfig& cfg);

// CSV: family,guaranteed_k,mean_ns,sd_ns,lookups,table_bytes,machine_label
void write_csv(std::ostream& os, const BenchReport& report);

// Markdown table grouped by guaranteed k (ascending), mirroring the CSV.
void write_markdown(std::ostream& os, const BenchReport& report);

// key=value lines: trials, keys, passes, families (comma-separated), seed,
// machine, parallel, instrument. Full-line # comments and blank lines are
// ignored. Unknown keys or unparsable values throw std::invalid_argument.
BenchConfig parse_bench_config(std::istream& is);

} // namespace tabhash
