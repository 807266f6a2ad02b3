#include "lab/search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lab/discrepancy.hpp"

namespace lab {

namespace {

// Bit rows of the pair predicate: row[x] = {y : op(x,y) in A} and
// col[y] = {x : op(x,y) in A}. All deviation search paths reduce to popcounts
// against these.
struct PairTable {
    std::uint32_t n = 0;
    std::size_t stride = 0;  // words per row
    std::vector<std::uint64_t> rows;
    std::vector<std::uint64_t> cols;

    explicit PairTable(const SubsetMask& a) {
        const Group& g = a.group();
        n = g.size();
        stride = (std::size_t{n} + 63) / 64;
        rows.assign(stride * n, 0);
        cols.assign(stride * n, 0);
        for (std::uint32_t x = 0; x < n; ++x) {
            for (std::uint32_t y = 0; y < n; ++y) {
                if (a.test(g.op(x, y))) {
                    rows[stride * x + (y >> 6)] |= std::uint64_t{1} << (y & 63);
                    cols[stride * y + (x >> 6)] |= std::uint64_t{1} << (x & 63);
                }
            }
        }
    }

    std::int64_t row_and_popcount(std::uint32_t x, const std::vector<std::uint64_t>& mask) const {
        const std::uint64_t* r = rows.data() + stride * x;
        std::int64_t c = 0;
        for (std::size_t w = 0; w < stride; ++w) c += std::popcount(r[w] & mask[w]);
        return c;
    }

    std::int64_t col_and_popcount(std::uint32_t y, const std::vector<std::uint64_t>& mask) const {
        const std::uint64_t* r = cols.data() + stride * y;
        std::int64_t c = 0;
        for (std::size_t w = 0; w < stride; ++w) c += std::popcount(r[w] & mask[w]);
        return c;
    }

    bool row_bit(std::uint32_t x, std::uint32_t y) const {
        return (rows[stride * x + (y >> 6)] >> (y & 63)) & 1u;
    }
};

// Exact comparison of |2c - k*m| / (2*k*m) fractions.
struct Deviation {
    std::int64_t num = -1;  // |2c - k*m|
    std::int64_t den = 1;   // 2*k*m

    static Deviation of(std::int64_t count, std::int64_t kx, std::int64_t ky) {
        const std::int64_t m = kx * ky;
        return Deviation{std::abs(2 * count - m), 2 * m};
    }
    bool better_than(const Deviation& o) const { return num * o.den > o.num * den; }
    double value() const { return double(num) / double(den); }
};

// Mutable search state with incrementally maintained per-element deltas.
struct SearchState {
    const PairTable& table;
    std::vector<std::uint64_t> xm, ym;
    std::vector<std::int64_t> dx;  // dx[x] = |{y in Y : op(x,y) in A}|
    std::vector<std::int64_t> dy;
    std::int64_t kx = 0, ky = 0, count = 0;

    SearchState(const PairTable& t, const SubsetMask& x0, const SubsetMask& y0)
        : table(t), xm(x0.words()), ym(y0.words()), dx(t.n), dy(t.n) {
        kx = x0.cardinality();
        ky = y0.cardinality();
        for (std::uint32_t e = 0; e < t.n; ++e) {
            dx[e] = t.row_and_popcount(e, ym);
            dy[e] = t.col_and_popcount(e, xm);
        }
        count = 0;
        for (std::uint32_t e : x0.elements()) count += dx[e];
    }

    bool in_x(std::uint32_t e) const { return (xm[e >> 6] >> (e & 63)) & 1u; }
    bool in_y(std::uint32_t e) const { return (ym[e >> 6] >> (e & 63)) & 1u; }

    void toggle_x(std::uint32_t e) {
        const bool was = in_x(e);
        xm[e >> 6] ^= std::uint64_t{1} << (e & 63);
        const int sgn = was ? -1 : 1;
        kx += sgn;
        count += sgn * dx[e];
        for (std::uint32_t y = 0; y < table.n; ++y)
            if (table.row_bit(e, y)) dy[y] += sgn;
    }

    void toggle_y(std::uint32_t e) {
        const bool was = in_y(e);
        ym[e >> 6] ^= std::uint64_t{1} << (e & 63);
        const int sgn = was ? -1 : 1;
        ky += sgn;
        count += sgn * dy[e];
        for (std::uint32_t x = 0; x < table.n; ++x)
            if (table.row_bit(x, e)) dx[x] += sgn;
    }

    Deviation deviation() const { return Deviation::of(count, kx, ky); }
};

SubsetMask mask_from_words(const Group& g, const std::vector<std::uint64_t>& words) {
    SubsetMask m(g);
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        while (bits) {
            m.set(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return m;
}

// A single candidate move; kind: 0 toggle-x, 1 toggle-y, 2 swap-x, 3 swap-y.
struct Move {
    int kind;
    std::uint32_t a, b;
};

// Best-improvement scan over the full add/remove/swap neighborhood. The
// objective |c'/M' - 1/2| is V-shaped in the element delta, so only extreme
// delta candidates per move family need evaluation.
std::optional<Move> best_greedy_move(const SearchState& st, std::uint32_t min_x,
                                     std::uint32_t min_y, Deviation& best) {
    std::optional<Move> chosen;
    auto consider = [&](Deviation cand, Move mv) {
        if (cand.better_than(best)) {
            best = cand;
            chosen = mv;
        }
    };

    const std::uint32_t n = st.table.n;
    // Extreme deltas per side, split by membership.
    std::int64_t max_in_dx = -1, min_in_dx = -1, max_out_dx = -1, min_out_dx = -1;
    std::uint32_t amax_in_dx = 0, amin_in_dx = 0, amax_out_dx = 0, amin_out_dx = 0;
    std::int64_t max_in_dy = -1, min_in_dy = -1, max_out_dy = -1, min_out_dy = -1;
    std::uint32_t amax_in_dy = 0, amin_in_dy = 0, amax_out_dy = 0, amin_out_dy = 0;
    for (std::uint32_t e = 0; e < n; ++e) {
        if (st.in_x(e)) {
            if (max_in_dx < 0 || st.dx[e] > max_in_dx) { max_in_dx = st.dx[e]; amax_in_dx = e; }
            if (min_in_dx < 0 || st.dx[e] < min_in_dx) { min_in_dx = st.dx[e]; amin_in_dx = e; }
        } else {
            if (max_out_dx < 0 || st.dx[e] > max_out_dx) { max_out_dx = st.dx[e]; amax_out_dx = e; }
            if (min_out_dx < 0 || st.dx[e] < min_out_dx) { min_out_dx = st.dx[e]; amin_out_dx = e; }
        }
        if (st.in_y(e)) {
            if (max_in_dy < 0 || st.dy[e] > max_in_dy) { max_in_dy = st.dy[e]; amax_in_dy = e; }
            if (min_in_dy < 0 || st.dy[e] < min_in_dy) { min_in_dy = st.dy[e]; amin_in_dy = e; }
        } else {
            if (max_out_dy < 0 || st.dy[e] > max_out_dy) { max_out_dy = st.dy[e]; amax_out_dy = e; }
            if (min_out_dy < 0 || st.dy[e] < min_out_dy) { min_out_dy = st.dy[e]; amin_out_dy = e; }
        }
    }

    // Adds.
    if (max_out_dx >= 0) {
        consider(Deviation::of(st.count + max_out_dx, st.kx + 1, st.ky), {0, amax_out_dx, 0});
        consider(Deviation::of(st.count + min_out_dx, st.kx + 1, st.ky), {0, amin_out_dx, 0});
    }
    if (max_out_dy >= 0) {
        consider(Deviation::of(st.count + max_out_dy, st.kx, st.ky + 1), {1, amax_out_dy, 0});
        consider(Deviation::of(st.count + min_out_dy, st.kx, st.ky + 1), {1, amin_out_dy, 0});
    }
    // Removes (respecting floors).
    if (st.kx > min_x && max_in_dx >= 0) {
        consider(Deviation::of(st.count - max_in_dx, st.kx - 1, st.ky), {0, amax_in_dx, 0});
        consider(Deviation::of(st.count - min_in_dx, st.kx - 1, st.ky), {0, amin_in_dx, 0});
    }
    if (st.ky > min_y && max_in_dy >= 0) {
        consider(Deviation::of(st.count - max_in_dy, st.kx, st.ky - 1), {1, amax_in_dy, 0});
        consider(Deviation::of(st.count - min_in_dy, st.kx, st.ky - 1), {1, amin_in_dy, 0});
    }
    // Swaps (size-preserving): extreme gain and extreme drop.
    if (max_out_dx >= 0 && min_in_dx >= 0) {
        consider(Deviation::of(st.count + max_out_dx - min_in_dx, st.kx, st.ky),
                 {2, amin_in_dx, amax_out_dx});
        consider(Deviation::of(st.count + min_out_dx - max_in_dx, st.kx, st.ky),
                 {2, amax_in_dx, amin_out_dx});
    }
    if (max_out_dy >= 0 && min_in_dy >= 0) {
        consider(Deviation::of(st.count + max_out_dy - min_in_dy, st.kx, st.ky),
                 {3, amin_in_dy, amax_out_dy});
        consider(Deviation::of(st.count + min_out_dy - max_in_dy, st.kx, st.ky),
                 {3, amax_in_dy, amin_out_dy});
    }
    return chosen;
}

void apply_move(SearchState& st, const Move& mv) {
    switch (mv.kind) {
        case 0: st.toggle_x(mv.a); break;
        case 1: st.toggle_y(mv.a); break;
        case 2: st.toggle_x(mv.a); st.toggle_x(mv.b); break;
        default: st.toggle_y(mv.a); st.toggle_y(mv.b); break;
    }
}

}  // namespace

SearchOutcome exhaustive_worst_pair(const SubsetMask& a, std::uint32_t min_size_x,
                                    std::uint32_t min_size_y) {
    const Group& g = a.group();
    const std::uint32_t n = g.size();
    if (n > 30) throw std::invalid_argument("exhaustive search is limited to n <= 30");
    const PairTable table(a);

    Deviation best;
    std::uint32_t best_xmask_bits = 0;
    std::vector<std::uint32_t> best_y_elems;
    std::int64_t best_kx = 0;
    std::uint64_t evaluations = 0;

    std::vector<std::int64_t> gcol(n);
    std::vector<std::uint32_t> order(n);
    std::vector<std::int64_t> prefix_hi(n + 1), prefix_lo(n + 1);

    const std::uint32_t total = 1u << n;
    for (std::uint32_t xmask = 0; xmask < total; ++xmask) {
        const auto kx = std::popcount(xmask);
        if (kx < int(min_size_x)) continue;
        for (std::uint32_t y = 0; y < n; ++y) {
            std::int64_t c = 0;
            std::uint32_t bits = xmask;
            while (bits) {
                const std::uint32_t x = std::uint32_t(std::countr_zero(bits));
                bits &= bits - 1;
                c += table.row_bit(x, y);
            }
            gcol[y] = c;
        }
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t u, std::uint32_t v) { return gcol[u] > gcol[v]; });
        prefix_hi[0] = prefix_lo[0] = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            prefix_hi[i + 1] = prefix_hi[i] + gcol[order[i]];
            prefix_lo[i + 1] = prefix_lo[i] + gcol[order[n - 1 - i]];
        }
        for (std::uint32_t m = min_size_y; m <= n; ++m) {
            ++evaluations;
            const Deviation hi = Deviation::of(prefix_hi[m], kx, m);
            const Deviation lo = Deviation::of(prefix_lo[m], kx, m);
            const bool hi_better = !lo.better_than(hi);
            const Deviation& cand = hi_better ? hi : lo;
            if (cand.better_than(best)) {
                best = cand;
                best_xmask_bits = xmask;
                best_kx = kx;
                best_y_elems.assign(m, 0);
                for (std::uint32_t i = 0; i < m; ++i)
                    best_y_elems[i] = hi_better ? order[i] : order[n - 1 - i];
            }
        }
    }
    (void)best_kx;

    SubsetMask bx(g), by(g);
    for (std::uint32_t e = 0; e < n; ++e)
        if ((best_xmask_bits >> e) & 1u) bx.set(e);
    for (std::uint32_t e : best_y_elems) by.set(e);
    const double dev = epsilon_deviation(bx, by, a);
    return SearchOutcome{std::move(bx), std::move(by), dev, SearchMethod::exhaustive, evaluations};
}

std::uint64_t exhaustive_pair_count(std::uint32_t n, std::uint32_t min_size_x,
                                    std::uint32_t min_size_y) {
    if (n > 62) return ~std::uint64_t{0};
    auto tail = [&](std::uint32_t lo) -> double {
        double sum = 0, c = 1;
        for (std::uint32_t k = 0; k <= n; ++k) {
            if (k >= lo) sum += c;
            c = c * double(n - k) / double(k + 1);
        }
        return sum;
    };
    const double pairs = tail(min_size_x) * tail(min_size_y);
    if (pairs > 1.8e19) return ~std::uint64_t{0};
    return static_cast<std::uint64_t>(pairs);
}

SearchOutcome worst_pair_search(const SubsetMask& a, const SearchConfig& config) {
    const Group& g = a.group();
    const std::uint32_t n = g.size();
    if (config.min_size_x < 1 || config.min_size_y < 1)
        throw std::invalid_argument("size floors must be at least 1");
    if (config.min_size_x > n || config.min_size_y > n)
        throw std::invalid_argument("size floors exceed the group size");

    if (config.method == SearchMethod::exhaustive) {
        if (exhaustive_pair_count(n, config.min_size_x, config.min_size_y) > config.budget)
            throw std::invalid_argument("exhaustive pair count exceeds the budget");
        return exhaustive_worst_pair(a, config.min_size_x, config.min_size_y);
    }

    const PairTable table(a);
    SubsetMask best_x(g), best_y(g);
    Deviation best;
    std::uint64_t evaluations = 0;
    const std::uint32_t restarts = std::max<std::uint32_t>(1, config.restarts);
    const SubsetMask universe = SubsetMask::full(g);

    for (std::uint32_t r = 0; r < restarts; ++r) {
        SubsetMask x0 = (r == 0 && config.start_x) ? *config.start_x
                        : random_fixed_size_subset(universe, config.min_size_x,
                                                   substream(config.seed, 2 * r));
        SubsetMask y0 = (r == 0 && config.start_y) ? *config.start_y
                        : random_fixed_size_subset(universe, config.min_size_y,
                                                   substream(config.seed, 2 * r + 1));

        if (config.method == SearchMethod::greedy) {
            SearchState st(table, x0, y0);
            Deviation cur = st.deviation();
            while (true) {
                Deviation best_move = cur;
                auto mv = best_greedy_move(st, config.min_size_x, config.min_size_y, best_move);
                evaluations += 12;
                if (!mv) break;
                apply_move(st, *mv);
                cur = best_move;
            }
            const Deviation dev = st.deviation();
            if (dev.better_than(best)) {
                best = dev;
                best_x = mask_from_words(g, st.xm);
                best_y = mask_from_words(g, st.ym);
            }
            continue;
        }

        // Simulated annealing with a geometric schedule. Move deltas are
        // evaluated on demand as single row/column popcounts, so proposals
        // cost O(N/64) words and accepted moves cost nothing extra.
        std::vector<std::uint64_t> xm = x0.words(), ym = y0.words();
        std::int64_t kx = x0.cardinality(), ky = y0.cardinality();
        std::int64_t count = 0;
        for (std::uint32_t e : x0.elements()) count += table.row_and_popcount(e, ym);
        auto in_x = [&](std::uint32_t e) { return (xm[e >> 6] >> (e & 63)) & 1u; };
        auto in_y = [&](std::uint32_t e) { return (ym[e >> 6] >> (e & 63)) & 1u; };
        auto flip_x = [&](std::uint32_t e) { xm[e >> 6] ^= std::uint64_t{1} << (e & 63); };
        auto flip_y = [&](std::uint32_t e) { ym[e >> 6] ^= std::uint64_t{1} << (e & 63); };

        const std::uint64_t steps = std::max<std::uint64_t>(1, config.budget / restarts);
        const double alpha = std::pow(config.t_min / config.t0, 1.0 / double(steps));
        double temp = config.t0;
        SplitMix64 rng(substream(config.seed, 1000 + r));
        Deviation cur = Deviation::of(count, kx, ky);
        Deviation local_best = cur;
        std::vector<std::uint64_t> best_xm = xm, best_ym = ym;

        // Kinds 0..5: add/remove/swap on the X side, then on the Y side.
        // Drawing the element from the relevant pool keeps add and remove
        // proposals balanced, so set sizes hover near the floors where the
        // large deviations live.
        auto pick_in = [&](const auto& member) {
            std::uint32_t e;
            do { e = std::uint32_t(rng.next_below(n)); } while (!member(e));
            return e;
        };
        auto pick_out = [&](const auto& member) {
            std::uint32_t e;
            do { e = std::uint32_t(rng.next_below(n)); } while (member(e));
            return e;
        };

        for (std::uint64_t step = 0; step < steps; ++step, temp *= alpha) {
            const int kind = int(rng.next_below(6));
            std::int64_t new_count = count, new_kx = kx, new_ky = ky;
            std::uint32_t ea = 0, eb = 0;
            bool feasible = true;
            switch (kind) {
                case 0:
                    if (kx == n) { feasible = false; break; }
                    ea = pick_out(in_x);
                    new_count += table.row_and_popcount(ea, ym);
                    ++new_kx;
                    break;
                case 1:
                    if (kx <= config.min_size_x) { feasible = false; break; }
                    ea = pick_in(in_x);
                    new_count -= table.row_and_popcount(ea, ym);
                    --new_kx;
                    break;
                case 2:
                    if (kx == 0 || kx == n) { feasible = false; break; }
                    ea = pick_in(in_x);
                    eb = pick_out(in_x);
                    new_count += table.row_and_popcount(eb, ym) - table.row_and_popcount(ea, ym);
                    break;
                case 3:
                    if (ky == n) { feasible = false; break; }
                    ea = pick_out(in_y);
                    new_count += table.col_and_popcount(ea, xm);
                    ++new_ky;
                    break;
                case 4:
                    if (ky <= config.min_size_y) { feasible = false; break; }
                    ea = pick_in(in_y);
                    new_count -= table.col_and_popcount(ea, xm);
                    --new_ky;
                    break;
                default:
                    if (ky == 0 || ky == n) { feasible = false; break; }
                    ea = pick_in(in_y);
                    eb = pick_out(in_y);
                    new_count += table.col_and_popcount(eb, xm) - table.col_and_popcount(ea, xm);
                    break;
            }
            if (!feasible) continue;
            ++evaluations;
            const Deviation cand = Deviation::of(new_count, new_kx, new_ky);
            const double delta = cand.value() - cur.value();
            if (delta >= 0 || rng.next_unit() < std::exp(delta / temp)) {
                switch (kind) {
                    case 0: case 1: flip_x(ea); break;
                    case 2: flip_x(ea); flip_x(eb); break;
                    case 3: case 4: flip_y(ea); break;
                    default: flip_y(ea); flip_y(eb); break;
                }
                count = new_count;
                kx = new_kx;
                ky = new_ky;
                cur = cand;
                if (cur.better_than(local_best)) {
                    local_best = cur;
                    best_xm = xm;
                    best_ym = ym;
                }
            }
        }
        if (local_best.better_than(best)) {
            best = local_best;
            best_x = mask_from_words(g, best_xm);
            best_y = mask_from_words(g, best_ym);
        }
    }

    const double dev = epsilon_deviation(best_x, best_y, a);
    return SearchOutcome{std::move(best_x), std::move(best_y), dev, config.method, evaluations};
}

}  // namespace lab
