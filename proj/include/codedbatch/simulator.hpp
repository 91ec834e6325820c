#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codedbatch/service_model.hpp"

// Monte Carlo engine for finite-n expected job completion time under the
// batch-generation protocol, plus deterministic sample-path checkers.
//
// Replications draw from independent substreams derived from the master seed
// by a counter-based split, and are reduced in replication order, so results
// are bit-identical for a fixed seed regardless of thread count.

namespace codedbatch {

struct SystemSpec {
    std::int64_t n;  // worker count
    std::int64_t j;  // job size in CUs
    SystemSpec(std::int64_t n, std::int64_t j);
    double l() const { return static_cast<double>(j) / static_cast<double>(n); }
};

struct Policy {
    std::int64_t k;  // redundancy parameter; code rate r = k/n
    std::int64_t b;  // batch size in CUs
    Policy(std::int64_t k, std::int64_t b);
};

// Derived sizes; construction validates the divisibility constraints.
struct PolicyDims {
    std::int64_t s;  // task size j/k
    std::int64_t g;  // generation count s/b
    double r;        // code rate k/n
};
PolicyDims policy_dims(const SystemSpec& spec, const Policy& policy);

enum class Method { monte_carlo, quadrature, asymptotic, exact };
const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct CompletionEstimate {
    double mean = 0.0;
    double std_err = 0.0;       // 0 for non-Monte-Carlo methods
    std::int64_t samples = 0;   // 0 for non-Monte-Carlo methods
    Method method = Method::monte_carlo;
};

struct SimOptions {
    std::int64_t samples = 100000;
    std::uint64_t seed = 42;
    int threads = 0;  // 0 = library default
};

// OpenMP-parallel Monte Carlo estimate: each replication draws, per
// generation, n independent batch times, takes the k-th smallest, and sums
// over generations.
CompletionEstimate simulate_ejct(const SystemSpec& spec, const Policy& policy,
                                 const ServiceModel& model, const SimOptions& opts = {});

// Straightforward serial engine kept as the reference implementation; must
// produce bit-identical estimates to simulate_ejct.
CompletionEstimate simulate_ejct_reference(const SystemSpec& spec, const Policy& policy,
                                           const ServiceModel& model, const SimOptions& opts = {});

// Substream seed for one replication index (counter-based splitmix mix).
std::uint64_t substream_seed(std::uint64_t master_seed, std::int64_t index);

// Row-major n x s matrix of per-CU execution times.
struct CuMatrix {
    std::int64_t rows = 0;  // workers
    std::int64_t cols = 0;  // CUs per task
    std::vector<double> data;
    CuMatrix(std::int64_t rows, std::int64_t cols);
    double& at(std::int64_t r, std::int64_t c) { return data[r * cols + c]; }
    double at(std::int64_t r, std::int64_t c) const { return data[r * cols + c]; }
};

struct PathCheck {
    bool holds;
    double lhs;
    double rhs;
};

// min over rows of total row time >= sum over blocks of (min over rows of
// block time). Block sums are accumulated once and reused on both sides, so
// the comparison is exact in floating point. Must hold for every input.
PathCheck check_min_superadditivity(const CuMatrix& cu, const std::vector<std::int64_t>& blocks);

// Mirror with max and <=.
PathCheck check_max_subadditivity(const CuMatrix& cu, const std::vector<std::int64_t>& blocks);

}  // namespace codedbatch
