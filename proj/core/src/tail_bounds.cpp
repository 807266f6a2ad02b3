#include "lab/tail_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Absolute slack for log-space comparisons; sound because the Chernoff gap
// grows like (1/2) log n and is 0.26+ even at n = 1.
double log_compare_slack(double nh) { return 1e-9 * (1.0 + std::abs(nh)); }

double log_mpz(const mpz_class& z) {
    signed long exp = 0;
    const double d = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(d) + double(exp) * kLn2;
}

}  // namespace

double rate_function(double x) {
    if (!(x >= 0.0) || x >= 0.5)
        throw std::domain_error("rate_function needs 0 <= x < 1/2");
    if (x == 0.0) return 0.0;
    return (0.5 + x) * std::log1p(2.0 * x) + (0.5 - x) * std::log1p(-2.0 * x);
}

std::uint64_t tail_threshold(double eps, std::uint64_t n) {
    const long double v = (0.5L + static_cast<long double>(eps)) * static_cast<long double>(n);
    long double t = std::ceil(v - 1e-9L);
    if (t < 0) t = 0;
    if (t > static_cast<long double>(n)) t = static_cast<long double>(n);
    return static_cast<std::uint64_t>(t);
}

mpq_class binomial_tail_exact(std::uint64_t n, std::uint64_t threshold) {
    if (n < 1) throw std::invalid_argument("binomial tail needs n >= 1");
    if (threshold > n + 1) throw std::invalid_argument("threshold out of range");
    if (threshold > n) return mpq_class(0);
    mpz_class sum = 0;
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), n, n);  // C(n, n) = 1
    for (std::uint64_t j = n;; --j) {
        sum += binom;
        if (j == threshold) break;
        // C(n, j-1) = C(n, j) * j / (n - j + 1)
        binom *= j;
        mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), n - j + 1);
    }
    mpz_class denom = 1;
    denom <<= n;
    mpq_class q(sum, denom);
    q.canonicalize();
    return q;
}

double log_rational(const mpq_class& q) {
    if (q <= 0) throw std::domain_error("log of a nonpositive rational");
    return log_mpz(q.get_num()) - log_mpz(q.get_den());
}

namespace {

// Claim: tail <= e^{-n h}. When the bound is representable as a double the
// comparison is exact rational vs a nudged-down double; otherwise compare in
// log space with directed slack.
bool upper_bound_holds(const mpq_class& tail, double nh, double exact_log) {
    if (nh < 700.0) {
        double bound = std::exp(-nh);
        for (int i = 0; i < 4; ++i) bound = std::nextafter(bound, 0.0);
        return tail <= mpq_class(bound);
    }
    return exact_log <= -nh - log_compare_slack(nh);
}

}  // namespace

BinomialBounds binomial_bounds_check(std::uint64_t n, double eps) {
    if (!(eps > 0.0) || eps >= 0.5)
        throw std::domain_error("binomial_bounds_check needs 0 < eps < 1/2");
    BinomialBounds out;
    out.n = n;
    out.epsilon = eps;
    out.threshold = tail_threshold(eps, n);
    out.exact = binomial_tail_exact(n, out.threshold);
    out.exact_log = log_rational(out.exact);
    const double nh = double(n) * rate_function(eps);
    out.upper_log = -nh;
    out.lower_slack = n >= 2 ? (-out.exact_log - nh) / std::log(double(n)) : 0.0;
    out.upper_holds = upper_bound_holds(out.exact, nh, out.exact_log);
    return out;
}

void binomial_tail_sweep(std::uint64_t n_max, std::span<const double> eps_grid,
                         const std::function<void(const TailGridPoint&)>& visit) {
    std::vector<double> h_values(eps_grid.size());
    for (std::size_t e = 0; e < eps_grid.size(); ++e) h_values[e] = rate_function(eps_grid[e]);

    for (std::uint64_t n = 1; n <= n_max; ++n) {
        std::vector<std::uint64_t> thresholds(eps_grid.size());
        std::uint64_t min_threshold = n;
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            thresholds[e] = tail_threshold(eps_grid[e], n);
            min_threshold = std::min(min_threshold, thresholds[e]);
        }
        std::vector<mpz_class> tails(eps_grid.size());

        mpz_class sum = 0;
        mpz_class binom = 1;  // C(n, n)
        for (std::uint64_t j = n;; --j) {
            sum += binom;
            for (std::size_t e = 0; e < eps_grid.size(); ++e)
                if (thresholds[e] == j) tails[e] = sum;
            if (j == min_threshold) break;
            binom *= j;
            mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), n - j + 1);
        }

        const double log_denom = double(n) * kLn2;
        mpz_class denom = 1;
        denom <<= n;
        for (std::size_t e = 0; e < eps_grid.size(); ++e) {
            TailGridPoint pt;
            pt.n = n;
            pt.epsilon = eps_grid[e];
            pt.threshold = thresholds[e];
            pt.exact_log = log_mpz(tails[e]) - log_denom;
            const double nh = double(n) * h_values[e];
            pt.upper_log = -nh;
            pt.lower_slack = n >= 2 ? (-pt.exact_log - nh) / std::log(double(n)) : 0.0;
            mpq_class tail(tails[e], denom);
            tail.canonicalize();
            pt.upper_holds = upper_bound_holds(tail, nh, pt.exact_log);
            visit(pt);
        }
    }
}

TailCertificate hoeffding_bound(std::span<const double> sup_norms, double lambda) {
    if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
    double sq_sum = 0;
    for (double s : sup_norms) {
        if (s < 0) throw std::invalid_argument("sup norms must be nonnegative");
        sq_sum += s * s;
    }
    TailCertificate cert;
    cert.kind = TailCertificate::Kind::hoeffding;
    cert.log_bound = -lambda * lambda / 2.0;
    cert.inputs = nlohmann::json{{"lambda", lambda},
                                 {"sup_norm_sq_sum", sq_sum},
                                 {"deviation_threshold", lambda * std::sqrt(sq_sum)},
                                 {"constant_convention", 1}};
    return cert;
}

TailCertificate binomial_exact_certificate(std::uint64_t n, std::uint64_t threshold) {
    const mpq_class tail = binomial_tail_exact(n, threshold);
    TailCertificate cert;
    cert.kind = TailCertificate::Kind::binomial_exact;
    cert.log_bound = tail > 0 ? log_rational(tail) : -std::numeric_limits<double>::infinity();
    cert.inputs = nlohmann::json{{"n", n},
                                 {"threshold", threshold},
                                 {"exact_numerator", tail.get_num().get_str()},
                                 {"exact_denominator", tail.get_den().get_str()}};
    return cert;
}

TailCertificate binomial_upper_certificate(std::uint64_t n, double eps) {
    TailCertificate cert;
    cert.kind = TailCertificate::Kind::binomial_upper;
    cert.log_bound = -double(n) * rate_function(eps);
    cert.inputs = nlohmann::json{
        {"n", n}, {"eps", eps}, {"threshold", tail_threshold(eps, n)}};
    return cert;
}

UnionBoundReport main_union_bound(std::uint32_t n_group, double eps, std::uint64_t t_size,
                                  double energy_ratio) {
    if (n_group < 2 || !(eps > 0) || t_size < 1 || !(energy_ratio > 0))
        throw std::invalid_argument("union bound needs positive inputs and N >= 2");
    const double log_n = std::log(double(n_group));
    UnionBoundReport rep;
    rep.per_pair_log_bound = -eps * eps * energy_ratio / 2.0;
    rep.count_log = 2.0 * double(t_size) * log_n;
    rep.net_log_bound = rep.count_log + rep.per_pair_log_bound;
    rep.required_ratio = 6.0 * double(t_size) * log_n / (eps * eps);
    rep.applicable = energy_ratio >= rep.required_ratio;
    return rep;
}

TailCertificate union_bound_certificate(std::uint32_t n_group, double eps, std::uint64_t t_size,
                                        double energy_ratio) {
    const UnionBoundReport rep = main_union_bound(n_group, eps, t_size, energy_ratio);
    TailCertificate cert;
    cert.kind = TailCertificate::Kind::union_bound;
    cert.log_bound = rep.net_log_bound;
    cert.inputs = nlohmann::json{{"n", n_group},
                                 {"eps", eps},
                                 {"t_size", t_size},
                                 {"energy_ratio", energy_ratio},
                                 {"per_pair_log_bound", rep.per_pair_log_bound},
                                 {"count_log", rep.count_log},
                                 {"required_ratio", rep.required_ratio},
                                 {"applicable", rep.applicable}};
    return cert;
}

}  // namespace lab
