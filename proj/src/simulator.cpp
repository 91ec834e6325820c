#include "codedbatch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace codedbatch {

SystemSpec::SystemSpec(std::int64_t n_, std::int64_t j_) : n(n_), j(j_) {
    if (n < 1) throw std::invalid_argument("system: worker count n must be >= 1");
    if (j < 1) throw std::invalid_argument("system: job size j must be >= 1");
}

Policy::Policy(std::int64_t k_, std::int64_t b_) : k(k_), b(b_) {
    if (k < 1) throw std::invalid_argument("policy: k must be >= 1");
    if (b < 1) throw std::invalid_argument("policy: b must be >= 1");
}

PolicyDims policy_dims(const SystemSpec& spec, const Policy& policy) {
    if (policy.k > spec.n)
        throw std::invalid_argument("policy: k=" + std::to_string(policy.k) +
                                    " exceeds worker count n=" + std::to_string(spec.n));
    if (spec.j % policy.k != 0)
        throw std::invalid_argument("policy: k=" + std::to_string(policy.k) +
                                    " does not divide job size j=" + std::to_string(spec.j) +
                                    " (task size s=j/k must be an integer)");
    const std::int64_t s = spec.j / policy.k;
    if (s % policy.b != 0)
        throw std::invalid_argument("policy: b=" + std::to_string(policy.b) +
                                    " does not divide task size s=" + std::to_string(s) +
                                    " (generation count g=s/b must be an integer)");
    return {s, s / policy.b, static_cast<double>(policy.k) / static_cast<double>(spec.n)};
}

const char* method_name(Method m) {
    switch (m) {
        case Method::monte_carlo: return "monte_carlo";
        case Method::quadrature: return "quadrature";
        case Method::asymptotic: return "asymptotic";
        default: return "exact";
    }
}

Method method_from_name(const std::string& name) {
    if (name == "monte_carlo") return Method::monte_carlo;
    if (name == "quadrature") return Method::quadrature;
    if (name == "asymptotic") return Method::asymptotic;
    if (name == "exact") return Method::exact;
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (monte_carlo|quadrature|asymptotic|exact)");
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// One replication: g generations of n batch draws each, k-th smallest per
// generation, summed. Draw order is generation-major, worker-minor, CU-inner.
double replication_total(const BatchTaskLaw& law, std::int64_t n, std::int64_t k, std::int64_t g,
                         Rng& rng, std::vector<double>& scratch) {
    double total = 0.0;
    for (std::int64_t gen = 0; gen < g; ++gen) {
        for (std::int64_t i = 0; i < n; ++i) scratch[i] = sample_batch(law, rng);
        std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.begin() + n);
        total += scratch[k - 1];
    }
    return total;
}

CompletionEstimate reduce_totals(const std::vector<double>& totals) {
    const std::int64_t n = static_cast<std::int64_t>(totals.size());
    CompletionEstimate est;
    est.method = Method::monte_carlo;
    est.samples = n;

    const auto [mn, mx] = std::minmax_element(totals.begin(), totals.end());
    if (*mn == *mx) {  // degenerate zero-variance law
        est.mean = *mn;
        est.std_err = 0.0;
        return est;
    }
    double sum = 0.0;
    for (double t : totals) sum += t;
    est.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0, comp = 0.0;  // corrected two-pass variance
        for (double t : totals) {
            const double d = t - est.mean;
            ss += d * d;
            comp += d;
        }
        const double var =
            (ss - comp * comp / static_cast<double>(n)) / static_cast<double>(n - 1);
        est.std_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
    return est;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, std::int64_t index) {
    return mix64(master_seed +
                 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1));
}

CompletionEstimate simulate_ejct(const SystemSpec& spec, const Policy& policy,
                                 const ServiceModel& model, const SimOptions& opts) {
    const PolicyDims dims = policy_dims(spec, policy);
    if (opts.samples < 1) throw std::invalid_argument("simulate: samples must be >= 1");

    const BatchTaskLaw law(model, policy.b);
    std::vector<double> totals(static_cast<std::size_t>(opts.samples));

#ifdef _OPENMP
    const int nt = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
    {
        std::vector<double> scratch(static_cast<std::size_t>(spec.n));
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < opts.samples; ++r) {
            Rng rng(substream_seed(opts.seed, r));
            totals[r] = replication_total(law, spec.n, policy.k, dims.g, rng, scratch);
        }
    }
#else
    std::vector<double> scratch(static_cast<std::size_t>(spec.n));
    for (std::int64_t r = 0; r < opts.samples; ++r) {
        Rng rng(substream_seed(opts.seed, r));
        totals[r] = replication_total(law, spec.n, policy.k, dims.g, rng, scratch);
    }
#endif
    return reduce_totals(totals);
}

CompletionEstimate simulate_ejct_reference(const SystemSpec& spec, const Policy& policy,
                                           const ServiceModel& model, const SimOptions& opts) {
    const PolicyDims dims = policy_dims(spec, policy);
    if (opts.samples < 1) throw std::invalid_argument("simulate: samples must be >= 1");

    const BatchTaskLaw law(model, policy.b);
    std::vector<double> totals(static_cast<std::size_t>(opts.samples));
    std::vector<double> scratch(static_cast<std::size_t>(spec.n));
    for (std::int64_t r = 0; r < opts.samples; ++r) {
        Rng rng(substream_seed(opts.seed, r));
        totals[r] = replication_total(law, spec.n, policy.k, dims.g, rng, scratch);
    }
    return reduce_totals(totals);
}

CuMatrix::CuMatrix(std::int64_t rows_, std::int64_t cols_) : rows(rows_), cols(cols_) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("cu matrix dimensions must be >= 1");
    data.assign(static_cast<std::size_t>(rows * cols), 0.0);
}

namespace {

// Per-row block sums for a contiguous column partition. Row totals are later
// accumulated from these same block sums, which keeps the floating-point
// comparison on the two sides of the inequality exact.
std::vector<double> block_sums(const CuMatrix& cu, const std::vector<std::int64_t>& blocks) {
    std::int64_t covered = 0;
    for (std::int64_t len : blocks) {
        if (len < 1) throw std::invalid_argument("grouping: block lengths must be >= 1");
        covered += len;
    }
    if (covered != cu.cols)
        throw std::invalid_argument("grouping: blocks cover " + std::to_string(covered) +
                                    " columns, matrix has " + std::to_string(cu.cols));
    std::vector<double> sums(static_cast<std::size_t>(cu.rows * blocks.size()));
    for (std::int64_t r = 0; r < cu.rows; ++r) {
        std::int64_t c = 0;
        for (std::size_t gi = 0; gi < blocks.size(); ++gi) {
            double s = 0.0;
            for (std::int64_t t = 0; t < blocks[gi]; ++t) s += cu.at(r, c + t);
            sums[r * blocks.size() + gi] = s;
            c += blocks[gi];
        }
    }
    return sums;
}

PathCheck path_check(const CuMatrix& cu, const std::vector<std::int64_t>& blocks, bool use_min) {
    const auto sums = block_sums(cu, blocks);
    const std::size_t gcount = blocks.size();

    double lhs = 0.0;
    for (std::int64_t r = 0; r < cu.rows; ++r) {
        double row_total = 0.0;
        for (std::size_t gi = 0; gi < gcount; ++gi) row_total += sums[r * gcount + gi];
        if (r == 0)
            lhs = row_total;
        else
            lhs = use_min ? std::min(lhs, row_total) : std::max(lhs, row_total);
    }

    double rhs = 0.0;
    for (std::size_t gi = 0; gi < gcount; ++gi) {
        double extreme = sums[gi];
        for (std::int64_t r = 1; r < cu.rows; ++r) {
            const double v = sums[r * gcount + gi];
            extreme = use_min ? std::min(extreme, v) : std::max(extreme, v);
        }
        rhs += extreme;
    }

    return {use_min ? lhs >= rhs : lhs <= rhs, lhs, rhs};
}

}  // namespace

PathCheck check_min_superadditivity(const CuMatrix& cu, const std::vector<std::int64_t>& blocks) {
    return path_check(cu, blocks, true);
}

PathCheck check_max_subadditivity(const CuMatrix& cu, const std::vector<std::int64_t>& blocks) {
    return path_check(cu, blocks, false);
}

}  // namespace codedbatch
