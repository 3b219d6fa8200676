#include "locmat/shape.hpp"

namespace locmat {

std::string SiteShape::str() const {
    std::string s = "default=" + std::to_string(default_size_);
    for (const auto& [site, n] : exceptions_) s += "," + std::to_string(site) + "=" + std::to_string(n);
    return s;
}

} // namespace locmat
