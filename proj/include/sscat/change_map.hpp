#pragma once

#include <cstdint>
#include <vector>

#include "sscat/errors.hpp"

namespace sscat {

// W x H boolean site map with a maintained population count. Used both for
// the per-stride change maps and for active-site masks. Sites are addressed
// row-major: site = y * width + x.
class ChangeMap {
public:
    ChangeMap() = default;
    ChangeMap(int width, int height)
        : w_(width), h_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return w_; }
    int height() const { return h_; }
    std::size_t size() const { return bits_.size(); }

    bool test(std::size_t site) const { return bits_[site] != 0; }
    bool test(int x, int y) const { return test(site_of(x, y)); }

    void set(std::size_t site) {
        if (!bits_[site]) {
            bits_[site] = 1;
            ++count_;
        }
    }
    void set(int x, int y) { set(site_of(x, y)); }

    void clear(std::size_t site) {
        if (bits_[site]) {
            bits_[site] = 0;
            --count_;
        }
    }

    void clear_all() {
        std::fill(bits_.begin(), bits_.end(), std::uint8_t{0});
        count_ = 0;
    }

    std::size_t count() const { return count_; }
    bool empty() const { return count_ == 0; }

    std::size_t site_of(int x, int y) const { return static_cast<std::size_t>(y) * w_ + x; }

    // Visit set sites in row-major order.
    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        if (count_ == 0) return;
        for (std::size_t s = 0; s < bits_.size(); ++s)
            if (bits_[s]) fn(s);
    }

    void merge(const ChangeMap& other) {
        if (other.w_ != w_ || other.h_ != h_) throw ShapeMismatchError("change map union shape mismatch");
        for (std::size_t s = 0; s < bits_.size(); ++s)
            if (other.bits_[s]) set(s);
    }

    bool operator==(const ChangeMap& o) const { return w_ == o.w_ && h_ == o.h_ && bits_ == o.bits_; }

private:
    int w_ = 0, h_ = 0;
    std::vector<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

}  // namespace sscat
