#pragma once

#include <map>
#include <string>

#include "locmat/error.hpp"

namespace locmat {

/// Sizes n_i >= 2 of the matrix factors, one per site i = 1, 2, 3, ...
/// Stored as a default size plus finitely many exceptions.
class SiteShape {
public:
    explicit SiteShape(int default_size, std::map<int, int> exceptions = {})
        : default_size_(default_size), exceptions_(std::move(exceptions)) {
        if (default_size_ < 2) fail(Errc::IndexOutOfRange, "site size must be >= 2");
        for (const auto& [site, n] : exceptions_) {
            if (site < 1) fail(Errc::IndexOutOfRange, "site index must be >= 1");
            if (n < 2) fail(Errc::IndexOutOfRange, "site size must be >= 2");
        }
    }

    int size(int site) const {
        if (site < 1) fail(Errc::IndexOutOfRange, "site index must be >= 1");
        auto it = exceptions_.find(site);
        return it == exceptions_.end() ? default_size_ : it->second;
    }

    int default_size() const { return default_size_; }
    const std::map<int, int>& exceptions() const { return exceptions_; }

    bool operator==(const SiteShape&) const = default;

    std::string str() const;

private:
    int default_size_;
    std::map<int, int> exceptions_;
};

inline void check_same_shape(const SiteShape& a, const SiteShape& b) {
    if (!(a == b)) fail(Errc::ShapeMismatch, "shape mismatch: " + a.str() + " vs " + b.str());
}

} // namespace locmat
