#include "rmtlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rmtlab {

namespace {

constexpr uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL; // golden-ratio Weyl increment

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

} // namespace

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t label_hash(std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

std::array<uint64_t, 2> RngStream::block(uint64_t ctr) const {
    uint64_t c0 = ctr, c1 = stream_, k = key_;
    for (int round = 0; round < 10; ++round) {
        uint64_t hi, lo;
        mulhilo(kPhiloxM, c0, hi, lo);
        c0 = hi ^ k ^ c1;
        c1 = lo;
        k += kPhiloxW;
    }
    return {c0, c1};
}

uint64_t RngStream::next_u64() {
    if (have_buffered_) {
        have_buffered_ = false;
        return buffered_;
    }
    auto b = block(counter_++);
    buffered_ = b[1];
    have_buffered_ = true;
    return b[0];
}

double RngStream::uniform() {
    // 53 effective bits, shifted half a ulp off the endpoints.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_gaussian_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_gaussian_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
        // boost by one and correct with u^{1/a}
        double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = gaussian();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::chi(double dof) {
    return std::sqrt(2.0 * gamma(0.5 * dof));
}

uint64_t RngStream::uniform_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        uint64_t x = next_u64();
        if (x < limit) return x % n;
    }
}

RngStream seed_stream(uint64_t master_seed, uint64_t sample_index, std::string_view label) {
    uint64_t key = mix64(master_seed ^ 0x7A3C0FEE12345601ULL);
    uint64_t id = mix64(mix64(sample_index) ^ label_hash(label));
    return RngStream(key, id);
}

} // namespace rmtlab
