#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "clonesim/cloners.hpp"

namespace clonesim {

/// Width of the symmetric periodic moving-average window.
class CoarseGrainSpec {
public:
    explicit CoarseGrainSpec(int sigma) : sigma_(sigma) {
        if (sigma < 1 || sigma % 2 == 0)
            throw std::invalid_argument("CoarseGrainSpec: sigma must be an odd positive integer (got " +
                                        std::to_string(sigma) + ")");
    }
    int sigma() const { return sigma_; }

private:
    int sigma_;
};

/// P̄(j) = (1/σ) Σ_{|d| <= (σ-1)/2} P((j+d) mod len).
inline std::vector<double> coarse_grain(std::span<const double> p, CoarseGrainSpec spec) {
    const int len = static_cast<int>(p.size());
    const int sigma = spec.sigma();
    if (sigma > len)
        throw std::invalid_argument("coarse_grain: sigma=" + std::to_string(sigma) +
                                    " exceeds the number of outcomes (" + std::to_string(len) + ")");
    const int half = (sigma - 1) / 2;
    std::vector<double> out(p.size());
    for (int j = 0; j < len; ++j) {
        double s = 0.0;
        for (int d = -half; d <= half; ++d) s += p[static_cast<std::size_t>(((j + d) % len + len) % len)];
        out[j] = s / sigma;
    }
    return out;
}

inline PhotonCountDistribution coarse_grain(const PhotonCountDistribution& p, CoarseGrainSpec spec) {
    return PhotonCountDistribution(coarse_grain(p.probabilities(), spec));
}

/// Sums neighbouring outcomes (2m, 2m+1) into one bin.
inline std::vector<double> pair_bin(std::span<const double> p) {
    std::vector<double> out((p.size() + 1) / 2, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) out[j / 2] += p[j];
    return out;
}

/// L1 distance Σ_j |P(j) - Q(j)|.
inline double manhattan_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw std::invalid_argument("manhattan_distance: length mismatch (" + std::to_string(p.size()) + " vs " +
                                    std::to_string(q.size()) + ")");
    double d = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) d += std::abs(p[j] - q[j]);
    return d;
}

inline double manhattan_distance(const PhotonCountDistribution& p, const PhotonCountDistribution& q) {
    return manhattan_distance(p.probabilities(), q.probabilities());
}

/// cos²(Δφ/2) P0 + sin²(Δφ/2) Pπ + 2 sin(Δφ/2) cos(Δφ/2) √(P0 Pπ), not renormalized.
/// Exact for the unitary cloner only.
inline std::vector<double> compose_delta_phi(std::span<const double> p0, std::span<const double> ppi,
                                             double delta_phi) {
    if (p0.size() != ppi.size()) throw std::invalid_argument("compose_delta_phi: length mismatch");
    const double c = std::cos(delta_phi / 2.0);
    const double s = std::sin(delta_phi / 2.0);
    std::vector<double> out(p0.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = c * c * p0[j] + s * s * ppi[j] + 2.0 * s * c * std::sqrt(p0[j] * ppi[j]);
    return out;
}

struct SweepRow {
    int N;
    int sigma;
    double sigma_over_N;
    double distance;
};

struct SweepResult {
    ClonerModel model_a;
    ClonerModel model_b;
    MeasurementSetting setting;
    std::vector<SweepRow> rows;
};

/// Default worker count: hardware concurrency, capped by CLONER_SIM_THREADS.
inline unsigned default_thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CLONER_SIM_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Coarse-grained distance between two models for every (N, σ) cell, N outer
/// and σ inner. Cells with σ > N+1 have no periodic window and are skipped.
/// Distributions are computed once per (model, N), in parallel across N.
inline SweepResult distance_sweep(const ClonerModel& model_a, const ClonerModel& model_b,
                                  const MeasurementSetting& setting, const std::vector<int>& Ns,
                                  const std::vector<int>& sigmas, unsigned threads = 0) {
    for (int s : sigmas) CoarseGrainSpec{s};
    if (threads == 0) threads = default_thread_count();

    std::vector<std::vector<SweepRow>> per_n(Ns.size());
    std::vector<std::exception_ptr> errors(Ns.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < Ns.size(); i = next++) {
            try {
                const int N = Ns[i];
                const auto pa = distribution(model_a, N, setting);
                const auto pb = distribution(model_b, N, setting);
                for (int sigma : sigmas) {
                    if (sigma > N + 1) continue;
                    const CoarseGrainSpec spec(sigma);
                    const double d =
                        manhattan_distance(coarse_grain(pa.probabilities(), spec), coarse_grain(pb.probabilities(), spec));
                    per_n[i].push_back({N, sigma, static_cast<double>(sigma) / N, d});
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto count = std::min<std::size_t>(threads, std::max<std::size_t>(1, Ns.size()));
        for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    SweepResult result{model_a, model_b, setting, {}};
    for (auto& rows : per_n) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    return result;
}

}  // namespace clonesim
