#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vbcomp {

// Seeded RNG with self-contained normal/gamma transforms. The standard
// library distributions are implementation-defined, which would break the
// bit-identical replication guarantee across toolchains, so the transforms
// live here: Box-Muller for normals, Marsaglia-Tsang for gammas.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform on (0,1)
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.2831853071795864769 * u2);
    }

    // shape a > 0, rate b > 0 (mean a/b)
    double gamma(double a, double b) {
        if (a < 1.0) {
            const double g = gamma(a + 1.0, 1.0);
            return g * std::pow(uniform(), 1.0 / a) / b;
        }
        const double d = a - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / b;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / b;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace vbcomp
