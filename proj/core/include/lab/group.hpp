#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lab/rng.hpp"

namespace lab {

enum class GroupKind { cyclic, boolean_cube, table };

// A finite group on dense element indices 0..N-1. Z/NZ uses index = residue,
// F_2^n uses index = bit pattern; anything else is table-backed. Instances
// are immutable and cheap to copy.
class Group {
public:
    static Group cyclic(std::uint32_t n);
    static Group boolean_cube(std::uint32_t dim);
    // Row-major n*n multiplication table. Rejects tables that are not a
    // group: the error names the violated axiom. Associativity is checked
    // exhaustively up to n = 256 and on random triples above that.
    static Group from_table(std::vector<std::uint32_t> table);

    GroupKind kind() const { return kind_; }
    std::uint32_t size() const { return n_; }
    // Cube dimension; only valid for boolean_cube groups.
    std::uint32_t dim() const;
    std::uint32_t identity() const { return identity_; }

    std::uint32_t op(std::uint32_t a, std::uint32_t b) const {
        switch (kind_) {
            case GroupKind::cyclic: {
                std::uint64_t s = std::uint64_t{a} + b;
                return static_cast<std::uint32_t>(s >= n_ ? s - n_ : s);
            }
            case GroupKind::boolean_cube:
                return a ^ b;
            default:
                return (*table_)[std::size_t{a} * n_ + b];
        }
    }

    std::uint32_t inv(std::uint32_t a) const {
        switch (kind_) {
            case GroupKind::cyclic:
                return a == 0 ? 0 : n_ - a;
            case GroupKind::boolean_cube:
                return a;
            default:
                return (*inverse_)[a];
        }
    }

    bool same_as(const Group& other) const {
        return kind_ == other.kind_ && n_ == other.n_ && table_ == other.table_;
    }

private:
    Group(GroupKind kind, std::uint32_t n) : kind_(kind), n_(n) {}

    GroupKind kind_;
    std::uint32_t n_ = 0;
    std::uint32_t identity_ = 0;
    std::shared_ptr<const std::vector<std::uint32_t>> table_;
    std::shared_ptr<const std::vector<std::uint32_t>> inverse_;
};

// A subset of group elements as a bit vector with cached cardinality. Value
// semantics; mutation is local to the owner.
class SubsetMask {
public:
    explicit SubsetMask(Group group);
    static SubsetMask full(const Group& group);
    static SubsetMask of(const Group& group, const std::vector<std::uint32_t>& elems);

    const Group& group() const { return group_; }
    std::uint32_t universe_size() const { return group_.size(); }
    std::uint32_t cardinality() const { return cardinality_; }

    bool test(std::uint32_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::uint32_t i);
    void reset(std::uint32_t i);

    std::vector<std::uint32_t> elements() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const SubsetMask& other) const {
        return group_.same_as(other.group_) && words_ == other.words_;
    }

private:
    Group group_;
    std::vector<std::uint64_t> words_;
    std::uint32_t cardinality_ = 0;
};

// f = 2*1_A - 1, the {-1,+1} indicator used by the centred inner products.
struct SignedIndicator {
    std::vector<std::int8_t> values;  // one of -1, +1 per element

    int value(std::uint32_t i) const { return values[i]; }
};

SignedIndicator signed_indicator(const SubsetMask& a);

// Each element included independently with probability 1/2; deterministic
// given the seed.
SubsetMask random_subset_density_half(const Group& group, Seed seed);

// Uniform over all `size`-element subsets of `parent` (partial Fisher-Yates
// on the parent's element list, so exactly uniform).
SubsetMask random_fixed_size_subset(const SubsetMask& parent, std::uint32_t size, Seed seed);

// {x^2 mod p : x = 1..p-1} over Z/pZ; 0 is not a residue. p must be an odd
// prime (trial division).
SubsetMask quadratic_residues(std::uint32_t p);

bool is_prime(std::uint64_t n);

namespace detail {
// Moves a uniform `size`-element sample to the front of `elems`; shared by
// the mask API and the Monte Carlo inner loops.
void partial_shuffle(std::vector<std::uint32_t>& elems, std::uint32_t size, SplitMix64& rng);
}  // namespace detail

// JSON form {"n": N, "elements": [...]} and a compact hex string with
// little-endian nibbles (bit 0 of digit 0 = element 0).
nlohmann::json mask_to_json(const SubsetMask& mask);
SubsetMask mask_from_json(const Group& group, const nlohmann::json& j);
std::string mask_to_hex(const SubsetMask& mask);
SubsetMask mask_from_hex(const Group& group, const std::string& hex);

}  // namespace lab
