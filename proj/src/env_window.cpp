#include "rwre/env_window.hpp"

#include <string>

namespace rwre {

BoxIndex::BoxIndex(int dim, std::int64_t radius, Site anchor) : dim_(dim), radius_(radius), anchor_(anchor) {
    if (!valid_dim(dim) || radius < 0) throw std::invalid_argument("BoxIndex: bad dimension or radius");
    side_ = static_cast<std::size_t>(2 * radius + 1);
    volume_ = 1;
    for (int i = 0; i < dim; ++i) volume_ *= side_;
}

EnvWindow::EnvWindow(const Environment& env, std::int64_t radius, Site anchor, std::size_t cell_budget)
    : env_(&env) {
    double cells = 1.0;
    for (int i = 0; i < env.dim(); ++i) cells *= static_cast<double>(2 * radius + 1);
    if (cells > static_cast<double>(cell_budget)) {
        throw ResourceGuardError("kernel-volume", "kernel-volume guard: window of radius " + std::to_string(radius) +
                                                      " in d=" + std::to_string(env.dim()) + " needs " +
                                                      std::to_string(static_cast<long long>(cells)) + " cells");
    }
    box_ = BoxIndex(env.dim(), radius, anchor);
    table_.resize(box_.volume());
    for (std::size_t i = 0; i < table_.size(); ++i) table_[i] = env.at(box_.site(i));
}

}  // namespace rwre
