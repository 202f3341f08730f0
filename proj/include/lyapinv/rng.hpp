#pragma once

#include <cstdint>
#include <random>

namespace lyapinv {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// A reproducible random stream identified by (master_seed, stream_id).
///
/// The engine is seeded from both identifiers through a seed sequence, so
/// distinct pairs give unrelated sequences and identical pairs replay the
/// same sequence bit for bit. Streams are cheap to copy; a copy continues
/// from the same state independently of the original.
class RngStream {
public:
    using engine_type = std::mt19937_64;
    using result_type = engine_type::result_type;

    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
        : master_seed_(master_seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                          static_cast<std::uint32_t>(master_seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32),
                          0x6c796170u};
        engine_.seed(seq);
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Child stream for worker or task `index`; depends only on this
    /// stream's identifiers, never on how much of it has been consumed.
    RngStream substream(std::uint64_t index) const {
        return RngStream(master_seed_,
                         detail::splitmix64(stream_id_ ^ detail::splitmix64(index + 1)));
    }

    static constexpr result_type min() { return engine_type::min(); }
    static constexpr result_type max() { return engine_type::max(); }
    result_type operator()() { return engine_(); }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    engine_type engine_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_;
};

}  // namespace lyapinv
