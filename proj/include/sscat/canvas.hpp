#pragma once

#include <cstdint>
#include <vector>

#include "sscat/change_map.hpp"
#include "sscat/errors.hpp"

namespace sscat {

// C x H x W feature tensor with an active-site mask and a change map.
// Values at inactive sites are kept exactly zero by every producer; sparse
// consumers rely on that.
template <typename T>
struct Canvas {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<T> values;  // [c][y][x]
    ChangeMap active;
    ChangeMap change;

    Canvas() = default;
    Canvas(int c, int h, int w)
        : channels(c),
          height(h),
          width(w),
          values(static_cast<std::size_t>(c) * h * w, T{0}),
          active(w, h),
          change(w, h) {}

    std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
    std::size_t site(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

    T at(int c, int y, int x) const { return values[c * plane() + site(x, y)]; }
    T& at(int c, int y, int x) { return values[c * plane() + site(x, y)]; }

    T at_site(int c, std::size_t s) const { return values[c * plane() + s]; }
    T& at_site(int c, std::size_t s) { return values[c * plane() + s]; }

    bool same_shape(const Canvas& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    void zero_site(std::size_t s) {
        for (int c = 0; c < channels; ++c) values[c * plane() + s] = T{0};
    }
};

}  // namespace sscat
