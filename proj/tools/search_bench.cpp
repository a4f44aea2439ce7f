// Compares the pruned OpenMP search kernel against the unpruned serial
// reference, and the parallel joint-distribution kernel against its serial
// counterpart: identical answers required, wall times and speedups reported.
// Agreement is asserted; speed is informational (on a single-core host the
// speedup is ~1x and the pruning does all the work).

#include "tabhash/independence.hpp"
#include "tabhash/search.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <omp.h>

namespace {

using namespace tabhash;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

struct Case {
    std::string name;
    DerivationSpec spec;
    std::int64_t n;
    int k;
};

// Every used cell covered an even number of times: the search target.
bool is_bad_set(const DerivationSpec& spec, const std::vector<Key>& keys) {
    std::map<std::pair<int, Char>, int> parity;
    for (const Key& key : keys) {
        const DerivedKey dk = derive(spec, key);
        for (int i = 0; i < spec.d; ++i) ++parity[{i, dk.values[i]}];
    }
    for (const auto& [cell, count] : parity)
        if (count % 2 != 0) return false;
    return true;
}

bool run_search_case(const Case& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const SearchResult serial =
        find_bad_arrangement_serial(c.spec, c.n, c.k);
    const double serial_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const SearchResult parallel = find_bad_arrangement(c.spec, c.n, c.k);
    const double parallel_ms = ms_since(t1);

    // The kernels enumerate in different orders, so when witnesses exist
    // they need not be the same set; presence must agree and each witness
    // must be genuinely bad.
    bool agree = serial.witness.has_value() == parallel.witness.has_value();
    if (agree && serial.witness) agree = is_bad_set(c.spec, *serial.witness);
    if (agree && parallel.witness)
        agree = is_bad_set(c.spec, *parallel.witness);
    std::cout << "| " << std::left << std::setw(22) << c.name << " | "
              << std::right << std::setw(9) << std::fixed
              << std::setprecision(1) << serial_ms << " | " << std::setw(11)
              << parallel_ms << " | " << std::setw(7)
              << std::setprecision(2)
              << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << " | "
              << std::setw(7)
              << (serial.witness ? "witness" : "none") << " | "
              << (agree ? "yes" : "NO") << " |\n";
    if (!agree)
        std::cerr << "MISMATCH on " << c.name
                  << ": serial and parallel kernels disagree\n";
    return agree;
}

bool run_joint_case(const std::string& name, const DerivationSpec& spec,
                    const std::vector<Key>& keys, int ell) {
    const auto t0 = std::chrono::steady_clock::now();
    const JointDistribution serial =
        exact_joint_distribution_serial(spec, keys, ell);
    const double serial_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const JointDistribution parallel =
        exact_joint_distribution(spec, keys, ell);
    const double parallel_ms = ms_since(t1);

    const bool agree =
        serial.counts == parallel.counts && serial.total == parallel.total;
    std::cout << "| " << std::left << std::setw(22) << name << " | "
              << std::right << std::setw(9) << std::fixed
              << std::setprecision(1) << serial_ms << " | " << std::setw(11)
              << parallel_ms << " | " << std::setw(7)
              << std::setprecision(2)
              << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << " | "
              << std::setw(7) << serial.total << " | "
              << (agree ? "yes" : "NO") << " |\n";
    if (!agree)
        std::cerr << "MISMATCH on " << name
                  << ": serial and parallel joint kernels disagree\n";
    return agree;
}

} // namespace

int main() {
    std::cout << "kernel comparison on " << omp_get_max_threads()
              << " OpenMP thread(s)\n\n";
    std::cout << "subset search: unpruned serial reference vs pruned "
                 "parallel kernel\n";
    std::cout << "| case                   | serial ms | parallel ms | "
                 "speedup | result  | agree |\n";
    std::cout << "|------------------------|-----------|-------------|"
                 "---------|---------|-------|\n";

    const std::vector<Case> cases = {
        {"curve q=2 d=2 n=5 k=4", DerivationSpec::curve(2, 2), 5, 4},
        {"curve q=2 d=3 n=5 k=6", DerivationSpec::curve(2, 3), 5, 6},
        {"curve q=2 d=3 n=6 k=6", DerivationSpec::curve(2, 3), 6, 6},
        {"curve q=2 d=4 n=4 k=6", DerivationSpec::curve(2, 4), 4, 6},
        {"identity q=2 n=5 k=4", DerivationSpec::identity(2), 5, 4},
        {"tz5 n=5 k=4", DerivationSpec::tz5(), 5, 4},
    };
    bool ok = true;
    for (const Case& c : cases) ok = run_search_case(c) && ok;

    std::cout << "\njoint distribution: serial vs chunked parallel kernel\n";
    std::cout << "| case                   | serial ms | parallel ms | "
                 "speedup | fills   | agree |\n";
    std::cout << "|------------------------|-----------|-------------|"
                 "---------|---------|-------|\n";
    ok = run_joint_case("identity 4 keys ell=3", DerivationSpec::identity(2),
                        {Key{0, 0}, Key{0, 1}, Key{1, 2}, Key{2, 3}}, 3) &&
         ok;
    ok = run_joint_case("curve d=3 4 keys ell=2", DerivationSpec::curve(2, 3),
                        {Key{0, 0}, Key{0, 1}, Key{1, 0}, Key{1, 1}}, 2) &&
         ok;

    if (!ok) {
        std::cerr << "\nkernel disagreement detected\n";
        return EXIT_FAILURE;
    }
    std::cout << "\nall kernels agree\n";
    return EXIT_SUCCESS;
}
