#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "lab/group.hpp"

namespace lab {

// Every tolerance referenced by transform checks lives here.
struct FourierTolerances {
    double parseval_rel = 1e-9;
    double inversion_abs = 1e-9;
    double gauss_nonzero_abs = 1e-9;
    double gauss_zero_abs = 1e-12;
    double energy_round_gap = 0.5;
    double bound_check_slack = 1e-9;
};

const FourierTolerances& fourier_tolerances();

// Fourier coefficients with the averaging normalization
// f_hat(r) = E_x f(x) e^{2 pi i x r / N} (cyclic) or E_x f(x) (-1)^{<x,r>}
// (boolean cube). Indexed by frequency r.
struct Spectrum {
    Group group;
    std::vector<std::complex<double>> coeffs;
};

// Cyclic or boolean-cube groups only; table-backed groups are rejected.
// Cyclic sizes up to 4096 use the direct O(N^2) sum, larger sizes a fast
// path; the two agree on overlapping sizes (tested).
Spectrum transform(std::span<const double> f, const Group& group);

// f(x) = sum_r f_hat(r) e^{-2 pi i x r / N}; recovers the input up to
// rounding.
std::vector<double> inverse_transform(const Spectrum& spectrum);

// Legendre symbol values chi(a) = (a/p) in {-1, 0, +1}, chi(0) = 0, computed
// by Euler's criterion.
struct QuadraticCharacter {
    std::uint32_t p = 0;
    std::vector<std::int8_t> values;

    int at(std::uint32_t a) const { return values[a]; }
};

QuadraticCharacter quadratic_character(std::uint32_t p);

// |chi_hat(r)| for r = 0..p-1. Gauss sums give p^{-1/2} for every r != 0 and
// 0 at r = 0.
std::vector<double> gauss_sum_profile(std::uint32_t p);

struct FourierBoundReport {
    double lhs_abs = 0;          // |sum_z r(z) f(z)|, exact integer combination
    double zero_mode_term = 0;   // |X||Y| |f_hat(0)|
    double sup_bound = 0;        // zero mode + N sup_{r!=0}|f_hat| sqrt(|X||Y|)
    double cs_exact = 0;         // N^2 sum_r |X_hat||Y_hat||f_hat|
    double cs_sup_profile = 0;   // N^{3/2} sum_r |X_hat||Y_hat|
    bool verified = false;       // lhs_abs <= sup_bound and <= cs_exact
};

// Spectral bound for |sum_z r(z) f(z)| where r is the representation
// function of (X, Y). For the quadratic character on Z/p the sup bound
// specializes to sqrt(p |X||Y|). The bound is checked against the exact left
// side, never assumed.
FourierBoundReport fourier_discrepancy_bound(const SubsetMask& x, const SubsetMask& y,
                                             std::span<const double> f);

// sum_z r(z)^2 via Parseval: N^3 sum_r |X_hat|^2 |Y_hat|^2, with DFT/WHT fast
// paths at every size. Errors if the float result is not within the rounding
// gap of an integer; callers then fall back to direct counting.
std::int64_t fast_energy(const SubsetMask& x, const SubsetMask& y);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

namespace detail {

// Unnormalized sums S(r) = sum_x f(x) e^{sign 2 pi i x r / N}.
std::vector<std::complex<double>> dft_direct(std::span<const std::complex<double>> f, int sign);
std::vector<std::complex<double>> fft_any(std::span<const std::complex<double>> f, int sign);

// In-place Walsh-Hadamard butterfly (self-inverse up to the factor N).
void wht_inplace(std::vector<double>& a);

// Normalized spectrum via the fast path regardless of size.
std::vector<std::complex<double>> spectrum_fast(std::span<const double> f, const Group& group);

}  // namespace detail

}  // namespace lab
