#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonesim/cloners.hpp"
#include "clonesim/fock.hpp"
#include "clonesim/special_functions.hpp"

namespace clonesim {

/// Micro-macro state (1/√2)(|e1>_A |Φ^⊥>_B - |e2>_A |Φ^φ>_B) of the amplified
/// singlet, truncated to at most `cutoff` photon pairs per B mode.
///
/// Amplitudes are stored without the 1/√2, indexed [a][n1][n2] with a the
/// micro mode and n1, n2 the photon numbers in the two B modes of `basis`
/// (dimension 2K+2 each).
struct TruncatedMicroMacroState {
    int cutoff = 0;
    Gain gain;
    ModeBasis basis;
    std::vector<cplx> amplitudes;
    double norm_deficit = 0.0;  // 1 - <ψ|ψ> of the truncated state
    double tail_bound = 0.0;    // analytic upper bound on norm_deficit
    bool cutoff_warning = false;

    int dim() const { return 2 * cutoff + 2; }
    std::size_t index(int a, int n1, int n2) const {
        return (static_cast<std::size_t>(a) * dim() + n1) * dim() + n2;
    }
    const cplx& at(int a, int n1, int n2) const { return amplitudes[index(a, n1, n2)]; }
};

inline constexpr double kCutoffWarning = 1e-8;

/// Bound on the weight lost by keeping k, l <= K in the pair expansions of
/// |Φ^φ> and |Φ^⊥>, using C(2k,k)/4^k <= 1 on the discarded tails.
inline double truncation_tail_bound(const Gain& gain, int K) {
    const double x = gain.Gamma() * gain.Gamma();
    if (x == 0.0) return 0.0;
    const double xk = std::pow(x, K + 1);
    const double tail_odd = xk * ((2.0 * K + 3.0) - (2.0 * K + 1.0) * x) / ((1.0 - x) * (1.0 - x));
    const double tail_even = xk / (1.0 - x);
    const double full_odd = std::pow(1.0 - x, -1.5);
    const double full_even = std::pow(1.0 - x, -0.5);
    return (1.0 - x) * (1.0 - x) * (tail_odd * full_even + full_odd * tail_even);
}

inline TruncatedMicroMacroState build_truncated_state(Gain gain, int cutoff, double basis_phi = 0.0) {
    if (cutoff < 0) throw std::invalid_argument("build_truncated_state: cutoff must be >= 0");
    TruncatedMicroMacroState st;
    st.cutoff = cutoff;
    st.gain = gain;
    st.basis = ModeBasis::equatorial(basis_phi);
    const int dim = st.dim();
    st.amplitudes.assign(2 * static_cast<std::size_t>(dim) * dim, cplx{});

    const double Gamma = gain.Gamma();
    const double log_c2 = -2.0 * std::log(gain.C());
    const double log_half_gamma = Gamma > 0.0 ? std::log(Gamma / 2.0) : 0.0;
    for (int k = 0; k <= cutoff; ++k) {
        for (int l = 0; l <= cutoff; ++l) {
            if (Gamma == 0.0 && k + l > 0) continue;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double log_gamma_kl = log_c2 + (k + l) * log_half_gamma - log_factorial(k) - log_factorial(l);
            // |Φ^φ>: |2k+1>|2l>, paired with micro mode e2 and a minus sign
            const double odd = std::exp(log_gamma_kl + 0.5 * (log_factorial(2 * k + 1) + log_factorial(2 * l)));
            st.amplitudes[st.index(1, 2 * k + 1, 2 * l)] = -sign * odd;
            // |Φ^⊥>: |2k>|2l+1>, paired with micro mode e1
            const double even = std::exp(log_gamma_kl + 0.5 * (log_factorial(2 * k) + log_factorial(2 * l + 1)));
            st.amplitudes[st.index(0, 2 * k, 2 * l + 1)] = sign * even;
        }
    }
    double norm = 0.0;
    for (const auto& a : st.amplitudes) norm += std::norm(a);
    st.norm_deficit = 1.0 - norm / 2.0;
    st.tail_bound = truncation_tail_bound(gain, cutoff);
    st.cutoff_warning = st.norm_deficit > kCutoffWarning;
    return st;
}

struct StokesExpectation {
    double jx = 0.0, jy = 0.0, jz = 0.0, n_total = 0.0;
    double corr_x = 0.0, corr_y = 0.0, corr_z = 0.0;
};

namespace detail {

/// G[a][a'][i][j] = <ψ_a| c_i^† c_j |ψ_a'> for the B-mode bilinears, where
/// ψ_a is the (unnormalized) B state attached to micro mode a.
using Bilinears = std::array<std::array<std::array<std::array<cplx, 2>, 2>, 2>, 2>;

inline Bilinears micro_macro_bilinears(const TruncatedMicroMacroState& st) {
    Bilinears G{};
    const int d = st.dim();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int n1 = 0; n1 < d; ++n1)
                for (int n2 = 0; n2 < d; ++n2) {
                    const cplx bra = std::conj(st.at(a, n1, n2));
                    if (bra == cplx{}) continue;
                    // diagonal number operators
                    const cplx ket = st.at(b, n1, n2);
                    G[a][b][0][0] += bra * static_cast<double>(n1) * ket;
                    G[a][b][1][1] += bra * static_cast<double>(n2) * ket;
                    // c1^† c2 |n1-1, n2+1> = √(n1 (n2+1)) |n1, n2>
                    if (n1 >= 1 && n2 + 1 < d)
                        G[a][b][0][1] += bra * std::sqrt(static_cast<double>(n1) * (n2 + 1)) * st.at(b, n1 - 1, n2 + 1);
                    if (n2 >= 1 && n1 + 1 < d)
                        G[a][b][1][0] += bra * std::sqrt(static_cast<double>(n2) * (n1 + 1)) * st.at(b, n1 + 1, n2 - 1);
                }
    return G;
}

/// Pauli matrix for axis 0=x, 1=y, 2=z expressed in the mode pair of `basis`.
inline std::array<std::array<cplx, 2>, 2> pauli_in_basis(int axis, const ModeBasis& basis) {
    std::array<std::array<cplx, 2>, 2> s{};
    const cplx I{0.0, 1.0};
    if (axis == 0) s = {{{0.0, 1.0}, {1.0, 0.0}}};
    else if (axis == 1) s = {{{0.0, -I}, {I, 0.0}}};
    else s = {{{1.0, 0.0}, {0.0, -1.0}}};
    const auto e0 = basis.mode_vector(0);
    const auto e1 = basis.mode_vector(1);
    const std::array<std::array<cplx, 2>, 2> U = {{{e0[0], e1[0]}, {e0[1], e1[1]}}};
    std::array<std::array<cplx, 2>, 2> out{};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) out[r][c] += std::conj(U[p][r]) * s[p][q] * U[q][c];
    return out;
}

inline double state_norm(const TruncatedMicroMacroState& st) {
    double n = 0.0;
    for (const auto& a : st.amplitudes) n += std::norm(a);
    return n;
}

}  // namespace detail

/// Per-axis Stokes expectations and micro-macro correlators <σ_n J_n>.
inline StokesExpectation stokes_expectation(const TruncatedMicroMacroState& st) {
    const auto G = detail::micro_macro_bilinears(st);
    const double norm = detail::state_norm(st);
    StokesExpectation out;
    out.n_total = (G[0][0][0][0] + G[0][0][1][1] + G[1][1][0][0] + G[1][1][1][1]).real() / norm;
    double* j_axes[3] = {&out.jx, &out.jy, &out.jz};
    double* c_axes[3] = {&out.corr_x, &out.corr_y, &out.corr_z};
    for (int axis = 0; axis < 3; ++axis) {
        const auto K = detail::pauli_in_basis(axis, st.basis);
        cplx j{}, corr{};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int i = 0; i < 2; ++i)
                    for (int k = 0; k < 2; ++k) {
                        if (a == b) j += K[i][k] * G[a][a][i][k];
                        corr += K[a][b] * K[i][k] * G[a][b][i][k];
                    }
        *j_axes[axis] = j.real() / norm;
        *c_axes[axis] = corr.real() / norm;
    }
    return out;
}

/// |<σ_A·J_B>| - <N_B>, with σ·σ contracted as 2 SWAP - 1 so no rotated
/// Pauli matrices enter (exact at g = 0).
inline double witness_excess(const TruncatedMicroMacroState& st) {
    const auto G = detail::micro_macro_bilinears(st);
    const double norm = detail::state_norm(st);
    cplx swap{}, number{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            swap += G[a][b][b][a];
            if (a == b) number += G[a][a][0][0] + G[a][a][1][1];
        }
    const double corr = (2.0 * swap - number).real();
    return std::abs(corr) / norm - number.real() / norm;
}

/// Witness for a measure-and-prepare cloner acting on one half of a singlet.
///
/// For axis n, an A outcome ±1 leaves B in |∓n>, which is then amplified, so
/// <σ_n J_n> = (E[J_n | input -n] - E[J_n | input +n]) / 2 with
/// E[J_n] = Σ_j (2j - N) P(j) counted along n.
inline double mp_witness_excess(const ClonerModel& model, int N) {
    if (model.kind() == ClonerModel::Kind::Unitary)
        throw std::invalid_argument("mp_witness_excess: expects a measure-and-prepare model");
    const std::array<ModeBasis, 3> axes = {ModeBasis(kPi / 2.0, 0.0), ModeBasis(kPi / 2.0, kPi / 2.0),
                                           ModeBasis(0.0, 0.0)};
    auto mean_j = [&](const ModeBasis& input, const ModeBasis& axis) {
        const auto p = distribution(model, N, {input, axis});
        detail::CompensatedSum s;
        for (int j = 0; j <= N; ++j) s.add((2.0 * j - N) * p[j]);
        return s.value();
    };
    double total = 0.0;
    for (const auto& axis : axes) total += 0.5 * (mean_j(axis.orthogonal(), axis) - mean_j(axis, axis));
    return std::abs(total) - N;
}

}  // namespace clonesim
