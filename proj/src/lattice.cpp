#include "rwre/lattice.hpp"

#include <cmath>

namespace rwre {

double norm2(const Site& x) noexcept { return std::sqrt(static_cast<double>(norm2_squared(x))); }

std::string to_string(const Site& x, int dim) {
    std::string out = "(";
    for (int i = 0; i < dim; ++i) {
        if (i) out += ',';
        out += std::to_string(x[i]);
    }
    return out + ")";
}

}  // namespace rwre
