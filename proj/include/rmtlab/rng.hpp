#pragma once
#include <array>
#include <cstdint>
#include <string_view>

namespace rmtlab {

/// Counter-based stream built on Philox2x64-10 (Salmon et al., SC'11).
///
/// A stream is addressed by (key, stream_id); the draw position is a plain
/// 64-bit counter. Identical (key, stream_id) always reproduce the same
/// sequence, independent of which thread consumes it, which is what makes
/// sample-level parallelism reproducible.
class RngStream {
public:
    RngStream(uint64_t key, uint64_t stream_id)
        : key_(key), stream_(stream_id) {}

    uint64_t next_u64();

    /// Uniform on the open interval (0,1); never returns an endpoint,
    /// so log(u) and Box-Muller are always finite.
    double uniform();

    /// Standard normal via Box-Muller (second value cached).
    double gaussian();

    /// Gamma(shape, scale=1), Marsaglia-Tsang squeeze; shape > 0.
    double gamma(double shape);

    /// chi distribution with `dof` degrees of freedom (dof > 0, non-integer ok).
    double chi(double dof);

    /// Uniform integer in [0, n).
    uint64_t uniform_below(uint64_t n);

    uint64_t counter() const { return counter_; }

private:
    std::array<uint64_t, 2> block(uint64_t ctr) const;

    uint64_t key_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint64_t buffered_ = 0;
    bool have_buffered_ = false;
    double spare_gaussian_ = 0.0;
    bool have_spare_ = false;
};

/// 64-bit finalizer from SplitMix64; used to whiten stream identifiers.
uint64_t mix64(uint64_t x);

/// FNV-1a hash of a label, mixed; keeps textual substream names apart.
uint64_t label_hash(std::string_view label);

/// Derive the reproducible stream for (master_seed, sample_index, label).
/// Same triple -> same stream, regardless of thread count or call order.
RngStream seed_stream(uint64_t master_seed, uint64_t sample_index, std::string_view label);

} // namespace rmtlab
