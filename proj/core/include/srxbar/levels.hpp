#pragma once

#include <cstdint>
#include <vector>

// Combinatorics of super-resolution node conductance sets.
//
// A node made of m parallel memristors, each programmable to one of L
// stable conductance values, realizes one conductance per multiset of
// device levels. The number of multisets is C(m+L-1, m), which walks the
// m-simplicial polytopic number sequence as L grows. When the level values
// form an arithmetic progression many multiset sums coincide, so the
// catalog carries both the combinatorial count and the effective count of
// sums that stay pairwise separated by more than a tolerance.

namespace srxbar {

/// Ordered stable conductance values of one memristor, in siemens.
class LevelSet {
public:
    /// Validates: non-empty, strictly increasing, all values > 0.
    static LevelSet from_values(std::vector<double> values_siemens);

    const std::vector<double>& values() const { return values_; }
    double g_min() const { return values_.front(); }
    double g_max() const { return values_.back(); }
    unsigned count() const { return static_cast<unsigned>(values_.size()); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// One size-m multiset of level indices and its parallel-sum conductance.
/// Canonical form: indices sorted so level values are non-increasing
/// (device order within a node carries no information).
struct NodeLevelMultiset {
    std::vector<std::uint16_t> level_indices;
    double sum_conductance = 0.0;
};

/// Every achievable node conductance for (levels, m), sorted ascending.
struct LevelCatalog {
    std::vector<NodeLevelMultiset> entries;
    std::uint64_t combinatorial_count = 0;  // C(m+L-1, m)
    std::uint64_t effective_count = 0;      // distinct sums under epsilon
    double epsilon = 0.0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;
inline constexpr double kDefaultEffectiveEpsilon = 1e-9;  // siemens

/// C(m+L-1, m): the combinatorial unique-conductance count L_C.
/// Throws std::domain_error for m or L = 0, std::range_error when
/// m + L > 64 (result could overflow 64-bit range).
std::uint64_t count_unique_levels(unsigned m, unsigned L);

/// C(base + m - 1, m) saturated at cap + 1, overflow-safe for any input.
/// Backs enumeration feasibility checks, which only need to know whether
/// the count stays under the cap.
std::uint64_t multiset_count_capped(std::uint64_t base, unsigned m, std::uint64_t cap);

/// [count_unique_levels(m, 1), ..., count_unique_levels(m, L_max)].
std::vector<std::uint64_t> simplicial_sequence(unsigned m, unsigned L_max);

/// Smallest m such that count_unique_levels(m, L) >= required_levels.
/// Throws std::domain_error when L == 1 and required_levels > 1.
unsigned select_node_size(unsigned L, std::uint64_t required_levels);

/// Enumerate every size-m multiset over the level set (parallel topology).
/// Throws enumeration_limit_error when C(m+L-1, m) exceeds the cap.
LevelCatalog enumerate_node_levels(const LevelSet& levels, unsigned m,
                                   double epsilon = kDefaultEffectiveEpsilon,
                                   std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace srxbar
