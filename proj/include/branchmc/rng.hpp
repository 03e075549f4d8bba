#pragma once

#include <array>
#include <cstdint>

namespace branchmc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Standard normal quantile (Wichura AS241, ~1e-16 relative accuracy).
double inverse_normal_cdf(double p);

/// Identifies one independent stream: (seed, sample index, particle id).
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t sample = 0;
    std::uint32_t particle = 0;
};

/// Reserved particle id for the birth-death clock of a sample.
inline constexpr std::uint32_t kTreeStream = 0xFFFFFFFFu;

/// Counter-based stream. Each stream is a distinct Philox counter
/// subspace, so streams never overlap and can be created in any order.
class RandomStream {
public:
    explicit RandomStream(StreamKey key) noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;
    double normal() noexcept { return inverse_normal_cdf(uniform()); }
    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) noexcept;

    /// Number of uniforms consumed so far.
    std::uint64_t consumed() const noexcept { return consumed_; }
    const StreamKey& key() const noexcept { return key_; }

private:
    void refill() noexcept;

    StreamKey key_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    std::uint64_t consumed_ = 0;
};

}  // namespace branchmc
