#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opchain/errors.hpp"

namespace opchain {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxEnumerate = 14;
inline constexpr int kMaxExtensionBlocks = 10;
inline constexpr int kMaxFreeMoment = 12;

struct FamilyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::invalid_argument {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos) : std::invalid_argument(what), position(pos) {}
};

enum class Family { NC, NCge2, NCpair };

// Set partition of {1..k}. Stored as a restricted growth string: label[i] is the block of element i+1,
// blocks numbered in order of their minimum element.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<std::uint8_t> labels);
    static Partition from_blocks(int k, const std::vector<std::vector<int>>& blocks);

    int k() const { return static_cast<int>(label_.size()); }
    int size() const { return nblocks_; }
    bool empty() const { return label_.empty(); }
    const std::vector<std::uint8_t>& labels() const { return label_; }

    // 1-based elements, each block increasing, blocks ordered by minimum.
    std::vector<std::vector<int>> blocks() const;
    int block_of(int element) const { return label_.at(element - 1); }
    bool joins(int i, int j) const { return block_of(i) == block_of(j); }

    bool is_noncrossing() const;
    int min_block_size() const;
    // Pairs (outer, inner) of block indices with outer surrounding inner.
    std::vector<std::pair<int, int>> surround_edges() const;

    std::string str() const;

    bool operator==(const Partition&) const = default;
    auto operator<=>(const Partition& o) const { return label_ <=> o.label_; }

private:
    std::vector<std::uint8_t> label_;
    int nblocks_ = 0;
};

bool in_family(const Partition& p, Family f);

void for_each_partition(int k, Family f, const std::function<void(const Partition&)>& fn);
std::vector<Partition> enumerate(int k, Family f);

struct Decomposition {
    enum class Kind { Concat, Nest };
    Kind kind = Kind::Concat;
    int m = 0;                   // outer block size minus one, for Nest
    std::vector<Partition> parts;
};

Decomposition decompose(const Partition& p);
Partition concat(const std::vector<Partition>& parts);
// Outer block of size parts.size()+1 with parts[j] inserted between its j-th and (j+1)-th elements.
Partition nest(const std::vector<Partition>& parts);
Partition recompose(const Decomposition& dec);

Rational alpha(const Partition& p);
Rational alpha_by_extensions(const Partition& p);
BigInt count_linear_extensions(const Partition& p);

// m_n = sum over NC(n) of prod_B kappa_{|B|}; kappa[0] is kappa_1, missing entries count as zero.
double free_moment_from_cumulants(std::span<const double> kappa, int n);

Partition parse_partition(const std::string& text);
std::string to_string(const Rational& r);

}  // namespace opchain
