#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clonesim {

using cplx = std::complex<double>;

/// Raised when a numerical guard (unitarity, normalization) trips.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = std::numbers::pi;

/// A polarization mode pair on the Bloch sphere.
///
/// The first mode is a_{θ,φ} = cos(θ/2) e^{iφ/2} a_h + sin(θ/2) e^{-iφ/2} a_v,
/// so its one-photon state is (cos(θ/2) e^{-iφ/2}, sin(θ/2) e^{iφ/2}) in h/v.
/// The second mode completes it to an SU(2) matrix,
/// (-sin(θ/2) e^{-iφ/2}, cos(θ/2) e^{iφ/2}), which coincides with a_{π-θ,φ+π}
/// up to a constant phase and makes (0, 0) the plain h/v basis.
class ModeBasis {
public:
    ModeBasis() = default;

    ModeBasis(double theta, double phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi))
            throw std::invalid_argument("ModeBasis: non-finite angle");
        theta = std::fmod(theta, 2.0 * kPi);
        if (theta < 0.0) theta += 2.0 * kPi;
        if (theta > kPi) {
            theta = 2.0 * kPi - theta;
            phi += kPi;
        }
        theta_ = theta;
        phi_ = reduce_phase(phi);
    }

    static ModeBasis hv() { return {}; }
    static ModeBasis equatorial(double phi) { return {kPi / 2.0, phi}; }

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    /// One-photon vector of the first (column 0) or second (column 1) mode in h/v.
    std::array<cplx, 2> mode_vector(int which) const {
        const double c = std::cos(theta_ / 2.0);
        const double s = std::sin(theta_ / 2.0);
        const cplx em = std::polar(1.0, -phi_ / 2.0);
        const cplx ep = std::polar(1.0, phi_ / 2.0);
        if (which == 0) return {c * em, s * ep};
        return {-s * em, c * ep};
    }

    /// Basis whose first mode is this basis' second mode.
    ModeBasis orthogonal() const { return {kPi - theta_, phi_ + kPi}; }

    friend bool operator==(const ModeBasis&, const ModeBasis&) = default;

    static double reduce_phase(double phi) {
        phi = std::fmod(phi, 2.0 * kPi);
        if (phi < 0.0) phi += 2.0 * kPi;
        if (phi >= 2.0 * kPi) phi = 0.0;
        return phi;
    }

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

/// Amplifier gain g = χt.
class Gain {
public:
    explicit Gain(double g = 0.0) : g_(g) {
        if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("Gain: g must be finite and >= 0");
    }
    double g() const { return g_; }
    double C() const { return std::cosh(g_); }
    double Gamma() const { return std::tanh(g_); }

private:
    double g_;
};

/// 2x2 one-photon mode change: entry (k, i) = <to_k | from_i>.
inline std::array<std::array<cplx, 2>, 2> mode_change_2x2(const ModeBasis& from, const ModeBasis& to) {
    std::array<std::array<cplx, 2>, 2> w{};
    if (from == to) return {{{1.0, 0.0}, {0.0, 1.0}}};
    for (int k = 0; k < 2; ++k) {
        const auto t = to.mode_vector(k);
        for (int i = 0; i < 2; ++i) {
            const auto f = from.mode_vector(i);
            w[k][i] = std::conj(t[0]) * f[0] + std::conj(t[1]) * f[1];
        }
    }
    return w;
}

/// Dense square complex matrix, column-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    cplx& operator()(std::size_t r, std::size_t c) { return data_[c * n_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * n_ + r]; }
    std::span<const cplx> column(std::size_t c) const { return {data_.data() + c * n_, n_}; }
    std::span<cplx> column(std::size_t c) { return {data_.data() + c * n_, n_}; }

    std::vector<cplx> apply(std::span<const cplx> x) const {
        if (x.size() != n_) throw std::invalid_argument("ComplexMatrix::apply: size mismatch");
        std::vector<cplx> y(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            if (x[c] == cplx{}) continue;
            const cplx* col = data_.data() + c * n_;
            for (std::size_t r = 0; r < n_; ++r) y[r] += col[r] * x[c];
        }
        return y;
    }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("ComplexMatrix: size mismatch");
        ComplexMatrix out(a.n_);
        for (std::size_t c = 0; c < a.n_; ++c)
            for (std::size_t k = 0; k < a.n_; ++k) {
                const cplx bkc = b(k, c);
                if (bkc == cplx{}) continue;
                for (std::size_t r = 0; r < a.n_; ++r) out(r, c) += a(r, k) * bkc;
            }
        return out;
    }

    /// max |(M^† M - I)_{ij}|
    double unitarity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx* ci = data_.data() + i * n_;
            for (std::size_t j = i; j < n_; ++j) {
                const cplx* cj = data_.data() + j * n_;
                cplx dot{};
                for (std::size_t r = 0; r < n_; ++r) dot += std::conj(ci[r]) * cj[r];
                if (i == j) dot -= 1.0;
                worst = std::max(worst, std::abs(dot));
            }
        }
        return worst;
    }

    double max_abs_diff(const ComplexMatrix& o) const {
        if (o.n_ != n_) throw std::invalid_argument("ComplexMatrix: size mismatch");
        double worst = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) worst = std::max(worst, std::abs(data_[i] - o.data_[i]));
        return worst;
    }

private:
    std::size_t n_ = 0;
    std::vector<cplx> data_;
};

inline constexpr double kUnitarityGuard = 1e-8;
inline constexpr double kNormGuard = 1e-10;

/// Representation of the mode change `from -> to` on the N-photon sector.
///
/// Entry (j, m) is <j, N-j|_to  |m, N-m>_from. Built one photon at a time:
/// with V the isometry that removes one photon (a_k / √L summed over modes),
/// D_L = V^† (D_{L-1} ⊗ W) V. Both V and V^† are contractions, so rounding
/// errors do not grow from level to level.
inline ComplexMatrix mode_rotation_matrix(int N, const ModeBasis& from, const ModeBasis& to) {
    if (N < 0) throw std::invalid_argument("mode_rotation_matrix: N must be >= 0");
    const auto dim = static_cast<std::size_t>(N) + 1;
    if (from == to) return ComplexMatrix::identity(dim);

    const auto w = mode_change_2x2(from, to);
    std::vector<double> sq(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) sq[k] = std::sqrt(static_cast<double>(k));

    ComplexMatrix prev = ComplexMatrix::identity(1);
    for (int L = 1; L <= N; ++L) {
        const auto n = static_cast<std::size_t>(L) + 1;
        const double inv_L = 1.0 / L;
        ComplexMatrix cur(n);
        for (std::size_t m = 0; m < n; ++m) {
            // source photon taken from the first mode (column m-1) or the second (column m)
            const double a_first = sq[m], a_second = sq[L - m];
            auto dst = cur.column(m);
            for (std::size_t k = 0; k < n; ++k) {
                cplx v{};
                for (int i = 0; i < 2; ++i) {
                    const double a = i == 0 ? a_first : a_second;
                    if (a == 0.0) continue;
                    const std::size_t col = i == 0 ? m - 1 : m;
                    if (k > 0) v += a * w[0][i] * sq[k] * prev(k - 1, col);
                    if (k < n - 1) v += a * w[1][i] * sq[L - k] * prev(k, col);
                }
                dst[k] = v * inv_L;
            }
        }
        prev = std::move(cur);
    }
    const double defect = prev.unitarity_defect();
    if (!(defect <= kUnitarityGuard))
        throw PrecisionError("mode_rotation_matrix: unitarity defect " + std::to_string(defect) +
                             " at N=" + std::to_string(N));
    return prev;
}

/// Pure state of N photons shared between the two modes of `basis`.
/// Entry m is the amplitude of m photons in the first mode and N-m in the second.
class SectorState {
public:
    SectorState(std::vector<cplx> amplitudes, ModeBasis basis) : amps_(std::move(amplitudes)), basis_(basis) {
        if (amps_.empty()) throw std::invalid_argument("SectorState: empty amplitude vector");
        const double defect = std::abs(norm_squared() - 1.0);
        if (!(defect <= kNormGuard))
            throw PrecisionError("SectorState: norm defect " + std::to_string(defect));
    }

    /// Rescales `amplitudes` to unit norm.
    static SectorState normalized(std::vector<cplx> amplitudes, ModeBasis basis) {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        if (!(s > 0.0)) throw std::invalid_argument("SectorState: zero vector cannot be normalized");
        const double f = 1.0 / std::sqrt(s);
        for (auto& a : amplitudes) a *= f;
        return {std::move(amplitudes), basis};
    }

    int total_photons() const { return static_cast<int>(amps_.size()) - 1; }
    std::span<const cplx> amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t m) const { return amps_[m]; }
    const ModeBasis& basis() const { return basis_; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

private:
    std::vector<cplx> amps_;
    ModeBasis basis_;
};

/// Re-expresses `state` in the modes of `to`.
inline SectorState rotate_sector_state(const SectorState& state, const ModeBasis& to) {
    if (state.basis() == to) return state;
    const auto D = mode_rotation_matrix(state.total_photons(), state.basis(), to);
    return SectorState(D.apply(state.amplitudes()), to);
}

/// Normalized photon-count histogram over j = 0..N for the first mode of a basis.
class PhotonCountDistribution {
public:
    PhotonCountDistribution() = default;

    explicit PhotonCountDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
        if (p_.empty()) throw std::invalid_argument("PhotonCountDistribution: empty");
        double s = 0.0;
        for (auto& x : p_) {
            if (!std::isfinite(x) || x < -1e-14)
                throw PrecisionError("PhotonCountDistribution: invalid entry " + std::to_string(x));
            if (x < 0.0) x = 0.0;
            s += x;
        }
        if (!(std::abs(s - 1.0) <= kNormGuard))
            throw PrecisionError("PhotonCountDistribution: probabilities sum to " + std::to_string(s));
    }

    int total_photons() const { return static_cast<int>(p_.size()) - 1; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t j) const { return p_[j]; }
    std::span<const double> probabilities() const { return p_; }

private:
    std::vector<double> p_;
};

/// Born rule in the state's own basis.
inline PhotonCountDistribution count_probabilities(const SectorState& state) {
    std::vector<double> p;
    p.reserve(state.amplitudes().size());
    for (const auto& a : state.amplitudes()) p.push_back(std::norm(a));
    return PhotonCountDistribution(std::move(p));
}

}  // namespace clonesim
