#include "srxbar/levels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "srxbar/errors.hpp"

namespace srxbar {

LevelSet LevelSet::from_values(std::vector<double> values_siemens) {
    if (values_siemens.empty()) {
        throw std::domain_error("LevelSet: empty level list");
    }
    for (std::size_t i = 0; i < values_siemens.size(); ++i) {
        if (!(values_siemens[i] > 0.0)) {
            throw std::domain_error("LevelSet: levels must be strictly positive");
        }
        if (i > 0 && !(values_siemens[i] > values_siemens[i - 1])) {
            throw std::domain_error("LevelSet: levels must be strictly increasing");
        }
    }
    LevelSet ls;
    ls.values_ = std::move(values_siemens);
    return ls;
}

std::uint64_t count_unique_levels(unsigned m, unsigned L) {
    if (m == 0 || L == 0) {
        throw std::domain_error("count_unique_levels: m and L must be >= 1");
    }
    if (m + L > 64) {
        throw std::range_error("count_unique_levels: m + L > 64 exceeds the 64-bit range guard");
    }
    // C(m+L-1, m) over the smaller cofactor; each partial product divides
    // exactly, and the guard above keeps every intermediate in range.
    const unsigned n = m + L - 1;
    const unsigned k = std::min(m, n - m);
    unsigned __int128 result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    if (result > static_cast<unsigned __int128>(UINT64_MAX)) {
        throw std::range_error("count_unique_levels: result exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(result);
}

std::uint64_t multiset_count_capped(std::uint64_t base, unsigned m, std::uint64_t cap) {
    if (base == 0 || m == 0) {
        throw std::domain_error("multiset_count_capped: base and m must be >= 1");
    }
    const std::uint64_t n = base + m - 1;
    const std::uint64_t k = std::min<std::uint64_t>(m, n - m);
    unsigned __int128 result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        // partial products C(n-k+i, i) only grow with i
        if (result > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(result);
}

std::vector<std::uint64_t> simplicial_sequence(unsigned m, unsigned L_max) {
    if (m == 0 || L_max == 0) {
        throw std::domain_error("simplicial_sequence: m and L_max must be >= 1");
    }
    std::vector<std::uint64_t> seq;
    seq.reserve(L_max);
    for (unsigned L = 1; L <= L_max; ++L) {
        seq.push_back(count_unique_levels(m, L));
    }
    return seq;
}

unsigned select_node_size(unsigned L, std::uint64_t required_levels) {
    if (L == 0 || required_levels == 0) {
        throw std::domain_error("select_node_size: L and required_levels must be >= 1");
    }
    if (L == 1) {
        if (required_levels > 1) {
            throw std::domain_error(
                "select_node_size: a single-level device can never exceed one node level");
        }
        return 1;
    }
    for (unsigned m = 1; m + L <= 64; ++m) {
        if (count_unique_levels(m, L) >= required_levels) return m;
    }
    throw std::range_error("select_node_size: required level count is out of range");
}

LevelCatalog enumerate_node_levels(const LevelSet& levels, unsigned m, double epsilon,
                                   std::uint64_t cap) {
    if (m == 0) {
        throw std::domain_error("enumerate_node_levels: m must be >= 1");
    }
    if (epsilon < 0.0) {
        throw std::domain_error("enumerate_node_levels: epsilon must be >= 0");
    }
    const unsigned L = levels.count();
    if (L > UINT16_MAX) {
        throw enumeration_limit_error("enumerate_node_levels: more than 65535 device levels");
    }
    const std::uint64_t total = multiset_count_capped(L, m, cap);
    if (total > cap) {
        throw enumeration_limit_error(
            "enumerate_node_levels: combination count exceeds the enumeration cap of " +
            std::to_string(cap));
    }

    LevelCatalog catalog;
    catalog.combinatorial_count = total;
    catalog.epsilon = epsilon;
    catalog.entries.reserve(static_cast<std::size_t>(total));

    // Walk multisets in non-increasing index order; that is already the
    // canonical per-entry form (level values non-increasing).
    std::vector<std::uint16_t> idx(m, static_cast<std::uint16_t>(L - 1));
    for (;;) {
        NodeLevelMultiset entry;
        entry.level_indices = idx;
        double sum = 0.0;
        for (const auto i : idx) sum += levels[i];
        entry.sum_conductance = sum;
        catalog.entries.push_back(std::move(entry));

        // Next multiset: decrement the rightmost index that can move and
        // reset everything after it to the same value.
        std::size_t pos = m;
        while (pos > 0 && idx[pos - 1] == 0) --pos;
        if (pos == 0) break;
        const std::uint16_t next = static_cast<std::uint16_t>(idx[pos - 1] - 1);
        for (std::size_t p = pos - 1; p < m; ++p) idx[p] = next;
    }

    std::stable_sort(catalog.entries.begin(), catalog.entries.end(),
                     [](const NodeLevelMultiset& a, const NodeLevelMultiset& b) {
                         if (a.sum_conductance != b.sum_conductance) {
                             return a.sum_conductance < b.sum_conductance;
                         }
                         return a.level_indices < b.level_indices;
                     });

    std::uint64_t effective = 0;
    double last_kept = 0.0;
    for (const auto& e : catalog.entries) {
        if (effective == 0 || e.sum_conductance - last_kept > epsilon) {
            ++effective;
            last_kept = e.sum_conductance;
        }
    }
    catalog.effective_count = effective;
    return catalog;
}

}  // namespace srxbar
