#include <random>

#include <gtest/gtest.h>

#include <lyapinv/partition.hpp>

#include "oracles.hpp"

using lyapinv::InvalidPartition;
using lyapinv::Partition;

TEST(Partition, Conjugate) {
    EXPECT_EQ((Partition{4, 4}).conjugate(), (Partition{2, 2, 2, 2}));
    EXPECT_EQ(Partition{}.conjugate(), Partition{});
    EXPECT_EQ((Partition{3, 1}).conjugate(), (Partition{2, 1, 1}));
}

TEST(Partition, ConjugateIsAnInvolution) {
    std::mt19937 gen(11);
    for (int t = 0; t < 10000; ++t) {
        const int w = std::uniform_int_distribution<int>(0, 30)(gen);
        std::vector<int> parts;
        int left = w;
        while (left > 0) {
            const int cap = parts.empty() ? left : std::min(left, parts.back());
            parts.push_back(std::uniform_int_distribution<int>(1, cap)(gen));
            left -= parts.back();
        }
        const Partition p(parts);
        ASSERT_EQ(p.conjugate().conjugate(), p);
        ASSERT_EQ(p.conjugate().weight(), p.weight());
    }
}

TEST(Partition, RejectsMalformedInput) {
    EXPECT_THROW(Partition({1, 2}), InvalidPartition);
    EXPECT_THROW(Partition({2, -1}), InvalidPartition);
    EXPECT_EQ(Partition(std::vector<int>{3, 0, 0}), Partition{3});
}

TEST(Partition, EvenAndHalved) {
    EXPECT_TRUE((Partition{4, 2}).is_even());
    EXPECT_FALSE((Partition{3, 1}).is_even());
    EXPECT_EQ((Partition{4, 2}).halved(), (Partition{2, 1}));
    EXPECT_THROW((Partition{3}).halved(), lyapinv::OddPartition);
}

TEST(Partition, Dominance) {
    EXPECT_TRUE((Partition{2}).dominates(Partition{1, 1}));
    EXPECT_FALSE((Partition{1, 1}).dominates(Partition{2}));
    EXPECT_TRUE((Partition{3, 2, 1}).dominates(Partition{2, 2, 2}));
    // Incomparable pairs.
    EXPECT_FALSE((Partition{3, 1, 1, 1}).dominates(Partition{2, 2, 2}));
    EXPECT_FALSE((Partition{2, 2, 2}).dominates(Partition{3, 1, 1, 1}));
    EXPECT_FALSE((Partition{4, 1, 1}).dominates(Partition{3, 3}));
    EXPECT_FALSE((Partition{3, 3}).dominates(Partition{4, 1, 1}));
}

TEST(PartitionsInBox, Examples) {
    EXPECT_EQ(lyapinv::partitions_in_box(4, 2, 2), (std::vector<Partition>{{2, 2}}));
    EXPECT_EQ(lyapinv::partitions_in_box(0, 3, 3), (std::vector<Partition>{Partition{}}));
    EXPECT_EQ(lyapinv::partitions_in_box(8, 2, 4), (std::vector<Partition>{{4, 4}}));
    EXPECT_TRUE(lyapinv::partitions_in_box(5, 2, 2).empty());
}

TEST(PartitionsInBox, MatchesBruteForceEnumeration) {
    for (int w = 0; w <= 14; ++w)
        for (int rows = 1; rows <= 5; ++rows)
            for (int cols = 1; cols <= 6; ++cols)
                ASSERT_EQ(lyapinv::partitions_in_box(w, rows, cols), oracle::brute_partitions(w, rows, cols))
                    << w << " " << rows << " " << cols;
}
