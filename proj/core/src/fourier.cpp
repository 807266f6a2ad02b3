#include "lab/fourier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lab/discrepancy.hpp"

namespace lab {

const FourierTolerances& fourier_tolerances() {
    static const FourierTolerances tol;
    return tol;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) result = (unsigned __int128)(result)*base % mod;
        base = (unsigned __int128)(base)*base % mod;
        exp >>= 1;
    }
    return result;
}

namespace detail {

std::vector<std::complex<double>> dft_direct(std::span<const std::complex<double>> f, int sign) {
    const std::size_t n = f.size();
    std::vector<std::complex<double>> out(n);
    // Twiddle table indexed by x*r mod n keeps the direct sum O(n^2) without
    // per-term trig calls.
    std::vector<std::complex<double>> tw(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = sign * 2.0 * std::numbers::pi * double(k) / double(n);
        tw[k] = {std::cos(ang), std::sin(ang)};
    }
    for (std::size_t r = 0; r < n; ++r) {
        std::complex<double> acc = 0;
        std::size_t idx = 0;
        for (std::size_t x = 0; x < n; ++x) {
            acc += f[x] * tw[idx];
            idx += r;
            if (idx >= n) idx -= n;
        }
        out[r] = acc;
    }
    return out;
}

namespace {

void fft_pow2_inplace(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / double(len);
        const std::complex<double> wl{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein's chirp z-transform for arbitrary length. Chirp exponents are
// reduced mod 2N before the trig call so angles stay small.
std::vector<std::complex<double>> bluestein(std::span<const std::complex<double>> f, int sign) {
    const std::size_t n = f.size();
    auto chirp = [&](std::uint64_t m) {
        const std::uint64_t q = (m * m) % (2 * n);
        const double ang = sign * std::numbers::pi * double(q) / double(n);
        return std::complex<double>{std::cos(ang), std::sin(ang)};
    };
    std::size_t l = 1;
    while (l < 2 * n - 1) l <<= 1;
    std::vector<std::complex<double>> a(l, 0.0), b(l, 0.0);
    for (std::size_t x = 0; x < n; ++x) a[x] = f[x] * chirp(x);
    for (std::size_t m = 0; m < n; ++m) {
        const auto c = std::conj(chirp(m));
        b[m] = c;
        if (m) b[l - m] = c;
    }
    fft_pow2_inplace(a, -1);
    fft_pow2_inplace(b, -1);
    for (std::size_t i = 0; i < l; ++i) a[i] *= b[i];
    fft_pow2_inplace(a, 1);
    std::vector<std::complex<double>> out(n);
    for (std::size_t r = 0; r < n; ++r) out[r] = chirp(r) * a[r] / double(l);
    return out;
}

}  // namespace

std::vector<std::complex<double>> fft_any(std::span<const std::complex<double>> f, int sign) {
    const std::size_t n = f.size();
    if (n == 0) throw std::invalid_argument("empty transform input");
    if (std::has_single_bit(n)) {
        std::vector<std::complex<double>> a(f.begin(), f.end());
        fft_pow2_inplace(a, sign);
        return a;
    }
    return bluestein(f, sign);
}

void wht_inplace(std::vector<double>& a) {
    const std::size_t n = a.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * len) {
            for (std::size_t k = 0; k < len; ++k) {
                const double u = a[i + k];
                const double v = a[i + k + len];
                a[i + k] = u + v;
                a[i + k + len] = u - v;
            }
        }
    }
}

std::vector<std::complex<double>> spectrum_fast(std::span<const double> f, const Group& group) {
    const std::size_t n = group.size();
    if (f.size() != n) throw std::invalid_argument("function length does not match group size");
    std::vector<std::complex<double>> out;
    if (group.kind() == GroupKind::boolean_cube) {
        std::vector<double> a(f.begin(), f.end());
        wht_inplace(a);
        out.resize(n);
        for (std::size_t r = 0; r < n; ++r) out[r] = a[r] / double(n);
        return out;
    }
    if (group.kind() != GroupKind::cyclic)
        throw std::invalid_argument("transforms need a cyclic or boolean-cube group");
    std::vector<std::complex<double>> a(n);
    for (std::size_t x = 0; x < n; ++x) a[x] = f[x];
    out = fft_any(a, +1);
    for (auto& c : out) c /= double(n);
    return out;
}

}  // namespace detail

namespace {

constexpr std::size_t kDirectCutoff = 4096;

}  // namespace

Spectrum transform(std::span<const double> f, const Group& group) {
    const std::size_t n = group.size();
    if (f.size() != n) throw std::invalid_argument("function length does not match group size");
    if (group.kind() == GroupKind::table)
        throw std::invalid_argument("transforms are not supported for table-backed groups");

    if (group.kind() == GroupKind::boolean_cube)
        return Spectrum{group, detail::spectrum_fast(f, group)};

    if (n <= kDirectCutoff) {
        std::vector<std::complex<double>> a(n);
        for (std::size_t x = 0; x < n; ++x) a[x] = f[x];
        auto coeffs = detail::dft_direct(a, +1);
        for (auto& c : coeffs) c /= double(n);
        return Spectrum{group, std::move(coeffs)};
    }
    return Spectrum{group, detail::spectrum_fast(f, group)};
}

std::vector<double> inverse_transform(const Spectrum& spectrum) {
    const Group& group = spectrum.group;
    const std::size_t n = group.size();
    if (spectrum.coeffs.size() != n)
        throw std::invalid_argument("spectrum length does not match group size");
    std::vector<double> out(n);
    if (group.kind() == GroupKind::boolean_cube) {
        std::vector<double> a(n);
        for (std::size_t r = 0; r < n; ++r) a[r] = spectrum.coeffs[r].real();
        detail::wht_inplace(a);
        return a;
    }
    auto vals = n <= kDirectCutoff ? detail::dft_direct(spectrum.coeffs, -1)
                                   : detail::fft_any(spectrum.coeffs, -1);
    for (std::size_t x = 0; x < n; ++x) out[x] = vals[x].real();
    return out;
}

QuadraticCharacter quadratic_character(std::uint32_t p) {
    if (p == 2 || !is_prime(p))
        throw std::invalid_argument("quadratic character needs an odd prime");
    QuadraticCharacter chi;
    chi.p = p;
    chi.values.assign(p, 0);
    const std::uint64_t e = (p - 1) / 2;
    for (std::uint32_t a = 1; a < p; ++a)
        chi.values[a] = pow_mod(a, e, p) == 1 ? 1 : -1;
    return chi;
}

std::vector<double> gauss_sum_profile(std::uint32_t p) {
    const QuadraticCharacter chi = quadratic_character(p);
    std::vector<double> f(p);
    for (std::uint32_t a = 0; a < p; ++a) f[a] = chi.at(a);
    const Spectrum s = transform(f, Group::cyclic(p));
    std::vector<double> out(p);
    for (std::uint32_t r = 0; r < p; ++r) out[r] = std::abs(s.coeffs[r]);
    return out;
}

FourierBoundReport fourier_discrepancy_bound(const SubsetMask& x, const SubsetMask& y,
                                             std::span<const double> f) {
    const Group& g = x.group();
    if (!g.same_as(y.group())) throw std::invalid_argument("masks live over different groups");
    if (g.kind() == GroupKind::table)
        throw std::invalid_argument("spectral bound needs a cyclic or boolean-cube group");
    const std::uint32_t n = g.size();
    if (f.size() != n) throw std::invalid_argument("function length does not match group size");

    const RepCounts rep = rep_counts(x, y);
    double lhs = 0;
    for (std::uint32_t z = 0; z < n; ++z) lhs += double(rep.counts[z]) * f[z];

    std::vector<double> fx(n, 0.0), fy(n, 0.0);
    for (std::uint32_t e = 0; e < n; ++e) {
        if (x.test(e)) fx[e] = 1.0;
        if (y.test(e)) fy[e] = 1.0;
    }
    const Spectrum sx = transform(fx, g);
    const Spectrum sy = transform(fy, g);
    const Spectrum sf = transform(f, g);

    const double sizes = double(x.cardinality()) * double(y.cardinality());
    double sup_nonzero = 0;
    double cs_exact = 0;
    double cs_profile = 0;
    for (std::uint32_t r = 0; r < n; ++r) {
        const double ax = std::abs(sx.coeffs[r]);
        const double ay = std::abs(sy.coeffs[r]);
        const double af = std::abs(sf.coeffs[r]);
        if (r != 0) sup_nonzero = std::max(sup_nonzero, af);
        cs_exact += ax * ay * af;
        cs_profile += ax * ay;
    }

    FourierBoundReport rep_out;
    rep_out.lhs_abs = std::abs(lhs);
    rep_out.zero_mode_term = sizes * std::abs(sf.coeffs[0]);
    rep_out.sup_bound = rep_out.zero_mode_term + double(n) * sup_nonzero * std::sqrt(sizes);
    rep_out.cs_exact = double(n) * double(n) * cs_exact;
    rep_out.cs_sup_profile = std::pow(double(n), 1.5) * cs_profile;
    const double slack = fourier_tolerances().bound_check_slack;
    rep_out.verified = rep_out.lhs_abs <= rep_out.sup_bound + slack * (1.0 + rep_out.sup_bound) &&
                       rep_out.lhs_abs <= rep_out.cs_exact + slack * (1.0 + rep_out.cs_exact);
    return rep_out;
}

std::int64_t fast_energy(const SubsetMask& x, const SubsetMask& y) {
    const Group& g = x.group();
    if (!g.same_as(y.group())) throw std::invalid_argument("masks live over different groups");
    if (g.kind() == GroupKind::table)
        throw std::invalid_argument("fast_energy needs a cyclic or boolean-cube group");
    const std::uint32_t n = g.size();
    std::vector<double> fx(n, 0.0), fy(n, 0.0);
    for (std::uint32_t e = 0; e < n; ++e) {
        if (x.test(e)) fx[e] = 1.0;
        if (y.test(e)) fy[e] = 1.0;
    }
    const auto sx = detail::spectrum_fast(fx, g);
    const auto sy = detail::spectrum_fast(fy, g);
    double sum = 0;
    for (std::uint32_t r = 0; r < n; ++r) sum += std::norm(sx[r]) * std::norm(sy[r]);
    const double value = double(n) * double(n) * double(n) * sum;
    const double rounded = std::nearbyint(value);
    if (std::abs(value - rounded) >= fourier_tolerances().energy_round_gap)
        throw std::runtime_error("fast_energy: transform result too far from an integer");
    return static_cast<std::int64_t>(rounded);
}

}  // namespace lab
