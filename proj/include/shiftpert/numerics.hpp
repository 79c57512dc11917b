#ifndef SHIFTPERT_NUMERICS_HPP
#define SHIFTPERT_NUMERICS_HPP

#include <complex>
#include <cstdint>
#include <cmath>
#include <vector>

namespace shiftpert {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Neumaier-compensated accumulator. Summation order is fixed by the
// caller, so results are bit-for-bit reproducible.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(cplx z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

// Unit complex number e^{i*pi*a}, exact at the half-integer multiples of pi
// used by measure fixtures (a = 0, +-1/2, 1, ...).
inline cplx unit_from_angle_over_pi(double a) {
    double r = std::fmod(a, 2.0);
    if (r <= -1.0) r += 2.0;
    if (r > 1.0) r -= 2.0;
    double twice = 2.0 * r;
    if (twice == std::nearbyint(twice)) {
        int k = static_cast<int>(std::lrint(twice));  // in {-1, 0, 1, 2}
        switch (k) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case -1: return {0.0, -1.0};
            case 2: return {-1.0, 0.0};
            default: break;
        }
    }
    return {std::cos(kPi * r), std::sin(kPi * r)};
}

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
    static const double nodes[16];
    static const double weights[16];
};

// SplitMix64-based generator with a fixed uniform mapping, so randomized
// suites reproduce bit-for-bit across platforms for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97f4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

// In-place radix-2 FFT (inverse = conjugate trick handled by caller).
void fft_radix2(std::vector<cplx>& a, bool inverse);

}  // namespace shiftpert

#endif
