#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonesim/fock.hpp"
#include "clonesim/special_functions.hpp"

namespace clonesim {

/// Which amplifier produced the macro state.
class ClonerModel {
public:
    enum class Kind { Unitary, MpEquatorial, MpSqueezed };

    static ClonerModel unitary(Gain gain = Gain{0.0}) { return ClonerModel(Kind::Unitary, 0, gain); }
    static ClonerModel mp_equatorial() { return ClonerModel(Kind::MpEquatorial, 0, std::nullopt); }
    static ClonerModel mp_squeezed(int tau) {
        if (tau < 0) throw std::invalid_argument("ClonerModel: tau must be >= 0");
        return ClonerModel(Kind::MpSqueezed, tau, std::nullopt);
    }

    Kind kind() const { return kind_; }
    /// Only meaningful for MpSqueezed.
    int tau() const { return tau_; }
    /// Only meaningful for Unitary.
    Gain gain() const { return gain_.value_or(Gain{0.0}); }

    /// "unitary", "mp-eq" or "mp-sq(tau=2)".
    std::string name() const {
        switch (kind_) {
            case Kind::Unitary: return "unitary";
            case Kind::MpEquatorial: return "mp-eq";
            case Kind::MpSqueezed: return "mp-sq(tau=" + std::to_string(tau_) + ")";
        }
        return {};
    }

    friend bool operator==(const ClonerModel& a, const ClonerModel& b) {
        return a.kind_ == b.kind_ && a.tau_ == b.tau_;
    }

private:
    ClonerModel(Kind k, int tau, std::optional<Gain> gain) : kind_(k), tau_(tau), gain_(gain) {}

    Kind kind_;
    int tau_;
    std::optional<Gain> gain_;
};

/// Polarization analysers: `micro` is the state the A measurement prepares
/// for the photon entering the amplifier, `macro` is the counting basis on B.
struct MeasurementSetting {
    ModeBasis micro;
    ModeBasis macro;

    double delta_phi() const { return ModeBasis::reduce_phase(micro.phi() - macro.phi()); }

    static MeasurementSetting from_angles(double theta_a, double phi_a, double theta_b, double phi_b) {
        return {ModeBasis(theta_a, phi_a), ModeBasis(theta_b, phi_b)};
    }
};

namespace detail {

inline void require_odd(int N, const char* where) {
    if (N < 1 || N % 2 == 0)
        throw std::invalid_argument(std::string(where) + ": total photon number must be odd (got N=" +
                                    std::to_string(N) +
                                    "); a single input photon plus created pairs always gives an odd count");
}

inline bool is_equatorial(const ModeBasis& b) { return std::abs(b.theta() - kPi / 2.0) <= 1e-12; }

/// Sector-N amplitudes (over m = photons in the input mode) of the amplified
/// input photon (`odd_branch`) or of the amplified orthogonal photon, with the
/// common factor C^{-2} (Γ/2)^{(N-1)/2} dropped. The sign (-1)^k comes from
/// γ_kl ∝ (-Γ/2)^k (Γ/2)^l.
inline std::vector<cplx> unitary_branch(int N, bool odd_branch) {
    const int pairs = (N - 1) / 2;
    std::vector<cplx> amps(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= pairs; ++k) {
        const int l = pairs - k;
        const int m = odd_branch ? 2 * k + 1 : 2 * k;
        const int other = N - m;
        const double log_mag =
            0.5 * (log_factorial(m) + log_factorial(other)) - log_factorial(k) - log_factorial(l);
        amps[m] = (k % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag - pairs * std::log(2.0));
    }
    return amps;
}

/// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace detail

namespace detail {

/// Sector-N state of the amplified photon |input>, in the equatorial pair at
/// the input's own phase. The input is split over that pair and both branches
/// are amplified, which is exact because the cloner is linear.
inline SectorState unitary_local_state(int N, const ModeBasis& input) {
    require_odd(N, "unitary cloner");
    const ModeBasis eq = ModeBasis::equatorial(input.phi());
    if (eq == input) return SectorState::normalized(unitary_branch(N, true), eq);
    const auto w = mode_change_2x2(input, eq);
    auto odd = unitary_branch(N, true);
    const auto even = unitary_branch(N, false);
    for (std::size_t m = 0; m < odd.size(); ++m) odd[m] = w[0][0] * odd[m] + w[1][0] * even[m];
    return SectorState::normalized(std::move(odd), eq);
}

}  // namespace detail

/// Fixed-N projection of the unitary phase-covariant cloner's output for an
/// equatorial input photon, returned in the h/v basis.
inline SectorState unitary_macro_sector(int N, const ModeBasis& input) {
    detail::require_odd(N, "unitary_macro_sector");
    if (!detail::is_equatorial(input))
        throw std::invalid_argument("unitary_macro_sector: input photon must be equatorial (theta = pi/2)");
    auto local = SectorState::normalized(detail::unitary_branch(N, true), ModeBasis::equatorial(input.phi()));
    return rotate_sector_state(local, ModeBasis::hv());
}

/// Same for any input direction, in h/v.
inline SectorState unitary_sector_state(int N, const ModeBasis& input) {
    detail::require_odd(N, "unitary_sector_state");
    return rotate_sector_state(detail::unitary_local_state(N, input), ModeBasis::hv());
}

/// Photon-count statistics of the unitary cloner in the macro basis. One
/// rotation, straight from the input's equatorial pair, so a matched setting
/// keeps its structural zeros exact.
inline PhotonCountDistribution unitary_distribution(int N, const MeasurementSetting& setting) {
    return count_probabilities(rotate_sector_state(detail::unitary_local_state(N, setting.micro), setting.macro));
}

/// Prepare state of the equatorial measure-and-prepare cloner, (b_φ^†)^N/√N! |0>, in h/v.
inline std::vector<cplx> mp_equatorial_amplitudes(int N, double phi) {
    std::vector<cplx> amps(static_cast<std::size_t>(N) + 1);
    const double half_log2 = 0.5 * N * std::log(2.0);
    for (int m = 0; m <= N; ++m) {
        const double mag = std::exp(0.5 * log_binomial(N, m) - half_log2);
        amps[m] = std::polar(mag, -phi * (2.0 * m - N) / 2.0);
    }
    return amps;
}

/// J_z-squeezed prepare state: the 2(τ+1) central h/v terms of the equatorial
/// state at phase φ, with equal moduli. Term k sits on |n-k>_h |n+k+1>_v and
/// |n+k+1>_h |n-k>_v with phases e^{±iφ(2k+1)/2}, n = (N-1)/2.
inline SectorState mp_squeezed_state(int N, int tau, double phi) {
    detail::require_odd(N, "mp_squeezed_state");
    const int n = (N - 1) / 2;
    if (tau < 0 || tau > n)
        throw std::invalid_argument("mp_squeezed_state: tau must lie in [0, (N-1)/2] (got tau=" +
                                    std::to_string(tau) + ", N=" + std::to_string(N) + ")");
    std::vector<cplx> amps(static_cast<std::size_t>(N) + 1);
    const double mag = 1.0 / std::sqrt(2.0 * (tau + 1));
    for (int k = 0; k <= tau; ++k) {
        const double ph = phi * (2.0 * k + 1.0) / 2.0;
        amps[n - k] = std::polar(mag, ph);
        amps[n + k + 1] = std::polar(mag, -ph);
    }
    return SectorState(std::move(amps), ModeBasis::hv());
}

/// Uniform grid size that integrates the measure-and-prepare mixture exactly.
inline int default_quadrature_nodes(int N) { return 4 * (N + 2); }

/// Mixture over the random equatorial measurement of a measure-and-prepare
/// cloner. With outcome φ (probability |<micro|φ>|²) the cloner prepares
/// `prepare(φ)` (h/v amplitudes); outcome φ⊥ is the same as φ+π, so
///   P(j) = (1/π) ∫_0^{2π} |<micro|φ>|² Q_φ(j) dφ.
/// The integrand is a trigonometric polynomial of degree <= N+1, so the
/// uniform rule with `nodes` > N+1 points is exact.
inline PhotonCountDistribution mp_mixture_distribution(
    int N, const MeasurementSetting& setting, const std::function<std::vector<cplx>(double)>& prepare,
    int nodes) {
    if (nodes <= N + 1) throw std::invalid_argument("mp_mixture_distribution: too few quadrature nodes");
    const auto to_macro = mode_rotation_matrix(N, ModeBasis::hv(), setting.macro);
    const auto micro = setting.micro.mode_vector(0);
    std::vector<detail::CompensatedSum> acc(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i < nodes; ++i) {
        const double phi = 2.0 * kPi * i / nodes;
        const auto eq = ModeBasis::equatorial(phi).mode_vector(0);
        const double weight = std::norm(std::conj(micro[0]) * eq[0] + std::conj(micro[1]) * eq[1]);
        if (weight == 0.0) continue;
        const auto amps = to_macro.apply(prepare(phi));
        for (std::size_t j = 0; j < amps.size(); ++j) acc[j].add(weight * std::norm(amps[j]));
    }
    std::vector<double> p(acc.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = 2.0 * acc[j].value() / nodes;
    return PhotonCountDistribution(std::move(p));
}

inline PhotonCountDistribution mp_equatorial_distribution(int N, const MeasurementSetting& setting,
                                                          int nodes = 0) {
    if (N < 1) throw std::invalid_argument("mp_equatorial_distribution: N must be >= 1");
    return mp_mixture_distribution(
        N, setting, [N](double phi) { return mp_equatorial_amplitudes(N, phi); },
        nodes > 0 ? nodes : default_quadrature_nodes(N));
}

inline PhotonCountDistribution mp_squeezed_distribution(int N, int tau, const MeasurementSetting& setting,
                                                        int nodes = 0) {
    mp_squeezed_state(N, tau, 0.0);  // validates (N, tau)
    return mp_mixture_distribution(
        N, setting,
        [N, tau](double phi) {
            const auto s = mp_squeezed_state(N, tau, phi);
            return std::vector<cplx>(s.amplitudes().begin(), s.amplitudes().end());
        },
        nodes > 0 ? nodes : default_quadrature_nodes(N));
}

/// Dispatch on the model kind.
inline PhotonCountDistribution distribution(const ClonerModel& model, int N, const MeasurementSetting& setting) {
    switch (model.kind()) {
        case ClonerModel::Kind::Unitary: return unitary_distribution(N, setting);
        case ClonerModel::Kind::MpEquatorial: return mp_equatorial_distribution(N, setting);
        case ClonerModel::Kind::MpSqueezed: return mp_squeezed_distribution(N, model.tau(), setting);
    }
    throw std::logic_error("distribution: unknown model");
}

/// Closed-form equatorial statistics at Δφ ∈ {0, π}.
///
/// The expressions below count photons in the counter orthogonal to the one
/// used here, so entry j is the expression evaluated at N-j. Entries whose half-integer
/// factorials have the wrong parity are structural zeros. The result is
/// normalized.
inline PhotonCountDistribution closed_form_distribution(ClonerModel::Kind kind, int N, bool delta_phi_is_pi) {
    if (kind == ClonerModel::Kind::MpSqueezed)
        throw std::invalid_argument("closed_form_distribution: no closed form for the squeezed model");
    if (kind == ClonerModel::Kind::Unitary) detail::require_odd(N, "closed_form_distribution");
    if (N < 1) throw std::invalid_argument("closed_form_distribution: N must be >= 1");
    const int n = N;

    // log of the orthogonal-counter value at index jj; -inf for structural zeros
    auto orthogonal_counter = [&](int jj) -> double {
        if (kind == ClonerModel::Kind::Unitary) {
            // P(j,0) = j!(n-j)! / ((j/2)! ((n-j-1)/2)!)^2, P(j,π) = j!(n-j)! / (((j-1)/2)! ((n-j)/2)!)^2
            const int a = delta_phi_is_pi ? jj - 1 : jj;
            const int b = delta_phi_is_pi ? n - jj : n - jj - 1;
            if (a < 0 || b < 0 || a % 2 != 0 || b % 2 != 0) return -INFINITY;
            return log_factorial(jj) + log_factorial(n - jj) - 2.0 * (log_factorial(a / 2) + log_factorial(b / 2));
        }
        // 2 n! / (π (n-j)! j!) B(j+1/2, n-j+3/2), and B(j+3/2, n-j+1/2) at π
        const double a = delta_phi_is_pi ? jj + 1.5 : jj + 0.5;
        const double b = delta_phi_is_pi ? n - jj + 0.5 : n - jj + 1.5;
        return std::log(2.0 / kPi) + log_factorial(n) - log_factorial(n - jj) - log_factorial(jj) +
               log_euler_beta(a, b);
    };

    std::vector<double> logs(static_cast<std::size_t>(N) + 1);
    double top = -INFINITY;
    for (int j = 0; j <= N; ++j) {
        logs[j] = orthogonal_counter(N - j);
        top = std::max(top, logs[j]);
    }
    std::vector<double> p(logs.size());
    detail::CompensatedSum total;
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = std::isinf(logs[j]) ? 0.0 : std::exp(logs[j] - top);
        total.add(p[j]);
    }
    for (auto& x : p) x /= total.value();
    return PhotonCountDistribution(std::move(p));
}

}  // namespace clonesim
