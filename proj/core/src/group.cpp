#include "lab/group.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lab {

Group Group::cyclic(std::uint32_t n) {
    if (n < 1) throw std::invalid_argument("cyclic group needs n >= 1");
    return Group(GroupKind::cyclic, n);
}

Group Group::boolean_cube(std::uint32_t dim) {
    if (dim < 1 || dim > 30) throw std::invalid_argument("boolean cube dimension out of range");
    Group g(GroupKind::boolean_cube, 1u << dim);
    return g;
}

std::uint32_t Group::dim() const {
    if (kind_ != GroupKind::boolean_cube)
        throw std::logic_error("dim() is only defined for boolean cube groups");
    return static_cast<std::uint32_t>(std::countr_zero(n_));
}

Group Group::from_table(std::vector<std::uint32_t> table) {
    const std::size_t cells = table.size();
    std::uint32_t n = static_cast<std::uint32_t>(std::llround(std::sqrt(double(cells))));
    if (std::size_t{n} * n != cells || n == 0)
        throw std::invalid_argument("multiplication table must be square and nonempty");
    for (std::uint32_t v : table)
        if (v >= n) throw std::invalid_argument("table entry out of range");

    auto at = [&](std::uint32_t a, std::uint32_t b) { return table[std::size_t{a} * n + b]; };

    // Identity: a two-sided unit.
    std::uint32_t id = n;
    for (std::uint32_t e = 0; e < n && id == n; ++e) {
        bool ok = true;
        for (std::uint32_t x = 0; x < n && ok; ++x)
            ok = at(e, x) == x && at(x, e) == x;
        if (ok) id = e;
    }
    if (id == n) throw std::invalid_argument("table has no identity element");

    auto inverse = std::make_shared<std::vector<std::uint32_t>>(n, n);
    for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = 0; y < n; ++y) {
            if (at(x, y) == id && at(y, x) == id) {
                (*inverse)[x] = y;
                break;
            }
        }
        if ((*inverse)[x] == n) throw std::invalid_argument("table element has no inverse");
    }

    if (n <= 256) {
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = 0; b < n; ++b)
                for (std::uint32_t c = 0; c < n; ++c)
                    if (at(at(a, b), c) != at(a, at(b, c)))
                        throw std::invalid_argument("table operation is not associative");
    } else {
        SplitMix64 rng(0x5eedULL ^ n);
        for (int i = 0; i < 200000; ++i) {
            auto a = static_cast<std::uint32_t>(rng.next_below(n));
            auto b = static_cast<std::uint32_t>(rng.next_below(n));
            auto c = static_cast<std::uint32_t>(rng.next_below(n));
            if (at(at(a, b), c) != at(a, at(b, c)))
                throw std::invalid_argument("table operation is not associative");
        }
    }

    Group g(GroupKind::table, n);
    g.identity_ = id;
    g.table_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(table));
    g.inverse_ = std::move(inverse);
    return g;
}

SubsetMask::SubsetMask(Group group)
    : group_(std::move(group)), words_((std::size_t{group_.size()} + 63) / 64, 0) {}

SubsetMask SubsetMask::full(const Group& group) {
    SubsetMask m(group);
    const std::uint32_t n = group.size();
    for (std::size_t w = 0; w < m.words_.size(); ++w) m.words_[w] = ~std::uint64_t{0};
    if (n & 63) m.words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
    m.cardinality_ = n;
    return m;
}

SubsetMask SubsetMask::of(const Group& group, const std::vector<std::uint32_t>& elems) {
    SubsetMask m(group);
    for (std::uint32_t e : elems) {
        if (e >= group.size()) throw std::invalid_argument("element index out of range");
        m.set(e);
    }
    return m;
}

void SubsetMask::set(std::uint32_t i) {
    std::uint64_t& w = words_[i >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (!(w & bit)) {
        w |= bit;
        ++cardinality_;
    }
}

void SubsetMask::reset(std::uint32_t i) {
    std::uint64_t& w = words_[i >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (w & bit) {
        w &= ~bit;
        --cardinality_;
    }
}

std::vector<std::uint32_t> SubsetMask::elements() const {
    std::vector<std::uint32_t> out;
    out.reserve(cardinality_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

SignedIndicator signed_indicator(const SubsetMask& a) {
    SignedIndicator f;
    f.values.resize(a.universe_size());
    for (std::uint32_t i = 0; i < a.universe_size(); ++i)
        f.values[i] = a.test(i) ? 1 : -1;
    return f;
}

SubsetMask random_subset_density_half(const Group& group, Seed seed) {
    SplitMix64 rng(seed);
    const std::uint32_t n = group.size();
    const std::size_t nwords = (std::size_t{n} + 63) / 64;
    SubsetMask out(group);
    for (std::size_t w = 0; w < nwords; ++w) {
        std::uint64_t bits = rng.next();
        if (w + 1 == nwords && (n & 63)) bits &= (std::uint64_t{1} << (n & 63)) - 1;
        while (bits) {
            out.set(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

namespace detail {

void partial_shuffle(std::vector<std::uint32_t>& elems, std::uint32_t size, SplitMix64& rng) {
    const std::size_t m = elems.size();
    for (std::uint32_t i = 0; i < size; ++i) {
        std::size_t j = i + rng.next_below(m - i);
        std::swap(elems[i], elems[j]);
    }
}

}  // namespace detail

SubsetMask random_fixed_size_subset(const SubsetMask& parent, std::uint32_t size, Seed seed) {
    if (size > parent.cardinality())
        throw std::invalid_argument("subset size exceeds parent cardinality");
    std::vector<std::uint32_t> elems = parent.elements();
    SplitMix64 rng(seed);
    detail::partial_shuffle(elems, size, rng);
    SubsetMask out(parent.group());
    for (std::uint32_t i = 0; i < size; ++i) out.set(elems[i]);
    return out;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

SubsetMask quadratic_residues(std::uint32_t p) {
    if (p == 2 || !is_prime(p))
        throw std::invalid_argument("quadratic_residues needs an odd prime");
    SubsetMask m(Group::cyclic(p));
    for (std::uint64_t x = 1; x < p; ++x)
        m.set(static_cast<std::uint32_t>((x * x) % p));
    return m;
}

nlohmann::json mask_to_json(const SubsetMask& mask) {
    return nlohmann::json{{"n", mask.universe_size()}, {"elements", mask.elements()}};
}

SubsetMask mask_from_json(const Group& group, const nlohmann::json& j) {
    if (j.at("n").get<std::uint32_t>() != group.size())
        throw std::invalid_argument("mask universe size does not match group");
    return SubsetMask::of(group, j.at("elements").get<std::vector<std::uint32_t>>());
}

std::string mask_to_hex(const SubsetMask& mask) {
    static const char digits[] = "0123456789abcdef";
    const std::uint32_t n = mask.universe_size();
    const std::uint32_t nibbles = (n + 3) / 4;
    std::string out(nibbles, '0');
    for (std::uint32_t i = 0; i < nibbles; ++i) {
        unsigned v = 0;
        for (unsigned b = 0; b < 4; ++b) {
            std::uint32_t idx = i * 4 + b;
            if (idx < n && mask.test(idx)) v |= 1u << b;
        }
        out[i] = digits[v];
    }
    return out;
}

SubsetMask mask_from_hex(const Group& group, const std::string& hex) {
    SubsetMask m(group);
    const std::uint32_t n = group.size();
    if (hex.size() != (n + 3) / 4)
        throw std::invalid_argument("hex mask length does not match group size");
    for (std::size_t i = 0; i < hex.size(); ++i) {
        char c = hex[i];
        unsigned v;
        if (c >= '0' && c <= '9') v = unsigned(c - '0');
        else if (c >= 'a' && c <= 'f') v = unsigned(c - 'a') + 10;
        else if (c >= 'A' && c <= 'F') v = unsigned(c - 'A') + 10;
        else throw std::invalid_argument("invalid hex digit in mask");
        for (unsigned b = 0; b < 4; ++b) {
            if (v & (1u << b)) {
                std::uint32_t idx = static_cast<std::uint32_t>(i * 4 + b);
                if (idx >= n) throw std::invalid_argument("hex mask sets bit beyond group size");
                m.set(idx);
            }
        }
    }
    return m;
}

}  // namespace lab
