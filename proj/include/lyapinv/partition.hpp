#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lyapinv {

/// Integer partition: weakly decreasing positive parts.
class Partition {
public:
    Partition() = default;
    Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

    /// Trailing zeros are dropped; anything else that is not a partition throws.
    explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
        while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] <= 0) throw InvalidPartition("partition parts must be positive");
            if (i > 0 && parts_[i] > parts_[i - 1]) throw InvalidPartition("partition parts must be non-increasing");
        }
    }

    const std::vector<int>& parts() const { return parts_; }
    std::size_t length() const { return parts_.size(); }
    int weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
    bool empty() const { return parts_.empty(); }
    int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

    bool is_even() const {
        return std::all_of(parts_.begin(), parts_.end(), [](int p) { return p % 2 == 0; });
    }

    Partition conjugate() const {
        std::vector<int> c(parts_.empty() ? 0 : parts_[0], 0);
        for (int p : parts_)
            for (int j = 0; j < p; ++j) ++c[j];
        return Partition(std::move(c));
    }

    /// Parts divided by two; requires an even partition.
    Partition halved() const {
        if (!is_even()) throw OddPartition("partition has an odd part");
        std::vector<int> h(parts_);
        for (auto& p : h) p /= 2;
        return Partition(std::move(h));
    }

    /// Dominance order: this >= other iff every prefix sum is at least as large.
    /// Only meaningful for partitions of the same weight.
    bool dominates(const Partition& other) const {
        int a = 0, b = 0;
        const auto len = std::max(length(), other.length());
        for (std::size_t i = 0; i < len; ++i) {
            a += (*this)[i];
            b += other[i];
            if (a < b) return false;
        }
        return true;
    }

    /// Lexicographic on parts.
    auto operator<=>(const Partition&) const = default;

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(parts_[i]);
        }
        return s + "]";
    }

private:
    std::vector<int> parts_;
};

inline std::ostream& operator<<(std::ostream& os, const Partition& p) { return os << p.str(); }

/// All partitions of `weight` with at most `max_rows` parts and largest part
/// at most `max_cols`, in reverse lexicographic order (largest first).
inline std::vector<Partition> partitions_in_box(int weight, int max_rows, int max_cols) {
    std::vector<Partition> out;
    if (weight < 0) return out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int cap) -> void {
        if (remaining == 0) {
            out.emplace_back(cur);
            return;
        }
        if (static_cast<int>(cur.size()) == max_rows) return;
        for (int p = std::min(remaining, cap); p >= 1; --p) {
            cur.push_back(p);
            self(self, remaining - p, p);
            cur.pop_back();
        }
    };
    rec(rec, weight, max_cols);
    return out;
}

/// All partitions of `weight` with at most `max_rows` parts.
inline std::vector<Partition> partitions_of(int weight, int max_rows) {
    return partitions_in_box(weight, max_rows, weight);
}

}  // namespace lyapinv
