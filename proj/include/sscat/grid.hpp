#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sscat/change_map.hpp"
#include "sscat/errors.hpp"
#include "sscat/stream.hpp"

namespace sscat {

struct GridConfig {
    double pillar_size = 0.16;  // meters, horizontal pillar footprint
    double x_min = 0.0, x_max = 80.64;
    double y_min = -40.32, y_max = 40.32;
    double z_min = -10.0, z_max = 10.0;
    int max_points_per_pillar = 100;  // N
    int max_active_pillars = 12000;   // P
    double window = 0.100;            // seconds
    double stride = 0.010;            // seconds

    int width() const { return span_cells(x_min, x_max); }
    int height() const { return span_cells(y_min, y_max); }

    void validate() const {
        if (pillar_size <= 0.0) throw ConfigError("pillar_size must be > 0");
        if (!cells_exact(x_min, x_max) || !cells_exact(y_min, y_max))
            throw ConfigError("x/y range must be an integer number of pillars");
        if (max_points_per_pillar < 1) throw ConfigError("max_points_per_pillar must be >= 1");
        if (max_active_pillars < 1) throw ConfigError("max_active_pillars must be >= 1");
        if (stride <= 0.0 || window <= 0.0 || stride > window)
            throw ConfigError("need 0 < stride <= window");
    }

    double pillar_center_x(int ix) const { return x_min + (static_cast<double>(ix) + 0.5) * pillar_size; }
    double pillar_center_y(int iy) const { return y_min + (static_cast<double>(iy) + 0.5) * pillar_size; }

private:
    int span_cells(double lo, double hi) const {
        return static_cast<int>(std::llround((hi - lo) / pillar_size));
    }
    bool cells_exact(double lo, double hi) const {
        const int n = span_cells(lo, hi);
        return n > 0 && std::abs(n * pillar_size - (hi - lo)) < 1e-6;
    }
};

struct PillarIndex {
    int ix = 0;
    int iy = 0;
    bool operator==(const PillarIndex&) const = default;
};

// Bin a point, half-open convention: a point exactly on the upper grid bound
// is out of bounds; on an internal edge it belongs to the higher-index
// pillar. The post-floor correction keeps exact multiples of pillar_size in
// the bin they belong to in real arithmetic.
inline std::optional<PillarIndex> locate(const StreamPoint& p, const GridConfig& cfg) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) return std::nullopt;
    if (p.z < cfg.z_min || p.z >= cfg.z_max) return std::nullopt;
    auto bin = [&](double value, double lo) {
        const double rel = value - lo;
        auto i = static_cast<std::int64_t>(std::floor(rel / cfg.pillar_size));
        if (static_cast<double>(i + 1) * cfg.pillar_size <= rel) ++i;
        else if (static_cast<double>(i) * cfg.pillar_size > rel) --i;
        return i;
    };
    const std::int64_t ix = bin(p.x, cfg.x_min);
    const std::int64_t iy = bin(p.y, cfg.y_min);
    if (ix < 0 || iy < 0 || ix >= cfg.width() || iy >= cfg.height()) return std::nullopt;
    return PillarIndex{static_cast<int>(ix), static_cast<int>(iy)};
}

// Point decorated with the D = 9 feature dimensions: raw position and
// intensity, offset to the pillar center (x_p, y_p), and offset to the
// pillar arithmetic mean (x_c, y_c, z_c).
struct DecoratedPoint {
    float x = 0, y = 0, z = 0;
    float intensity = 0;
    float x_p = 0, y_p = 0;
    float x_c = 0, y_c = 0, z_c = 0;
};

// Fixed-capacity ring of timestamped points for one pillar. Slots stay in
// insertion (time) order from oldest to newest; eviction pops the head.
class PillarBuffer {
public:
    struct Slot {
        double t = 0.0;
        DecoratedPoint point;
    };

    PillarBuffer(PillarIndex coord, int capacity) : coord_(coord), slots_(static_cast<std::size_t>(capacity)) {}

    PillarIndex coordinates() const { return coord_; }
    int count() const { return count_; }
    int capacity() const { return static_cast<int>(slots_.size()); }
    bool full() const { return count_ == capacity(); }

    const Slot& at(int i) const { return slots_[index(i)]; }
    Slot& at(int i) { return slots_[index(i)]; }

    void push_back(double t, const DecoratedPoint& p) {
        Slot& s = slots_[index(count_)];
        s.t = t;
        s.point = p;
        ++count_;
    }

    void pop_front() {
        slots_[static_cast<std::size_t>(head_)] = Slot{};  // zero-pad the vacated slot
        head_ = (head_ + 1) % capacity();
        --count_;
    }

    double oldest_t() const { return slots_[static_cast<std::size_t>(head_)].t; }

private:
    std::size_t index(int i) const { return static_cast<std::size_t>((head_ + i) % capacity()); }

    PillarIndex coord_;
    std::vector<Slot> slots_;
    int head_ = 0;
    int count_ = 0;
};

enum class OverflowPolicy {
    kError,      // throw PillarOverflowError / ActivePillarOverflowError
    kDropNewest  // count the drop, keep the buffer as is
};

struct IngestReport {
    std::uint64_t inserted = 0;
    std::uint64_t dropped_oob = 0;
    std::uint64_t overflowed = 0;
};

struct EvictReport {
    std::uint64_t removed = 0;
    std::uint64_t emptied = 0;
};

// Per-stride work tally feeding the operation cost model.
struct StrideOps {
    std::uint64_t insertions = 0;
    std::uint64_t removals = 0;
    std::uint64_t decorated_points = 0;  // sum of pillar sizes over changed pillars

    void reset() { *this = StrideOps{}; }
};

// Cost model: 6 ops per insertion, 13 per removal, n per changed pillar for
// the arithmetic mean, 3 per point for the x/y/z offsets.
inline std::uint64_t count_ops(const StrideOps& ops) {
    return 6 * ops.insertions + 13 * ops.removals + ops.decorated_points + 3 * ops.decorated_points;
}

// One-shot cost model for the same window: every point is binned afresh
// (6 ops each) and every pillar is decorated (n + 3n), no removals.
inline std::uint64_t count_ops_one_shot(std::uint64_t window_points) { return 10 * window_points; }

// Sliding-window pillar grid. Pillars are materialized lazily; an emptied
// pillar releases its buffer. Eviction is driven by one global FIFO of
// insertion records, so a stride costs O(insertions + evictions), not a grid
// scan. Single writer per stride; callers serialize ingest/evict/refresh.
class PillarGrid {
public:
    explicit PillarGrid(const GridConfig& cfg, OverflowPolicy policy = OverflowPolicy::kError)
        : cfg_(cfg), policy_(policy), w_(cfg.width()), h_(cfg.height()),
          pillars_(static_cast<std::size_t>(w_) * h_) {
        cfg_.validate();
    }

    const GridConfig& config() const { return cfg_; }
    int width() const { return w_; }
    int height() const { return h_; }
    int active_pillars() const { return active_count_; }
    std::uint64_t stored_points() const { return stored_points_; }

    const PillarBuffer* pillar(int ix, int iy) const { return pillars_[site(ix, iy)].get(); }
    const PillarBuffer* pillar_at(std::size_t s) const { return pillars_[s].get(); }
    std::size_t site(int ix, int iy) const { return static_cast<std::size_t>(iy) * w_ + ix; }

    // Insert one packet's points. Sets the change bit of every touched
    // pillar and records insertions in the eviction FIFO. Points outside the
    // grid are dropped (normal, counted). Overflow handling per policy.
    IngestReport ingest_packet(std::span<const StreamPoint> points, double t_now, ChangeMap& change,
                               StrideOps* ops = nullptr) {
        IngestReport report;
        for (const auto& p : points) {
            if (p.t > t_now || p.t <= t_now - cfg_.stride - 1e-12)
                throw OrderError("ingest_packet: point timestamp outside the current stride");
            const auto idx = locate(p, cfg_);
            if (!idx) {
                ++report.dropped_oob;
                continue;
            }
            const std::size_t s = site(idx->ix, idx->iy);
            auto& buf = pillars_[s];
            if (!buf) {
                if (active_count_ >= cfg_.max_active_pillars)
                    throw ActivePillarOverflowError("active pillar count exceeds P = " +
                                                    std::to_string(cfg_.max_active_pillars));
                buf = std::make_unique<PillarBuffer>(*idx, cfg_.max_points_per_pillar);
                ++active_count_;
            }
            if (buf->full()) {
                // assertion against silent random sampling
                if (policy_ == OverflowPolicy::kError)
                    throw PillarOverflowError("pillar (" + std::to_string(idx->ix) + "," +
                                              std::to_string(idx->iy) + ") exceeds N = " +
                                              std::to_string(cfg_.max_points_per_pillar));
                ++report.overflowed;
                change.set(s);
                continue;
            }
            DecoratedPoint d;
            d.x = p.x;
            d.y = p.y;
            d.z = p.z;
            d.intensity = p.intensity;
            d.x_p = static_cast<float>(static_cast<double>(p.x) - cfg_.pillar_center_x(idx->ix));
            d.y_p = static_cast<float>(static_cast<double>(p.y) - cfg_.pillar_center_y(idx->iy));
            buf->push_back(p.t, d);
            fifo_.push_back(Record{p.t, *idx});
            change.set(s);
            ++report.inserted;
            ++stored_points_;
        }
        if (ops) ops->insertions += report.inserted;
        return report;
    }

    // Remove every point with t < t_now - window. Relies on stream time
    // order: the FIFO head is always the oldest point in the grid.
    EvictReport evict_expired(double t_now, ChangeMap& change, StrideOps* ops = nullptr) {
        EvictReport report;
        const double cutoff = t_now - cfg_.window;
        while (!fifo_.empty() && fifo_.front().t < cutoff) {
            const Record rec = fifo_.front();
            fifo_.pop_front();
            const std::size_t s = site(rec.where.ix, rec.where.iy);
            auto& buf = pillars_[s];
            if (!buf || buf->count() == 0) throw Error("eviction FIFO out of sync with grid");
            buf->pop_front();
            change.set(s);
            ++report.removed;
            --stored_points_;
            if (buf->count() == 0) {
                buf.reset();
                --active_count_;
                ++report.emptied;
            }
        }
        if (ops) ops->removals += report.removed;
        return report;
    }

    // Recompute x_c/y_c/z_c for every changed pillar. The mean moved, so all
    // of the pillar's points are refreshed, not just new ones. x_p/y_p
    // depend only on the point and the pillar center and are left alone.
    int refresh_decorations(const ChangeMap& change, StrideOps* ops = nullptr) {
        int refreshed = 0;
        change.for_each_set([&](std::size_t s) {
            auto& buf = pillars_[s];
            if (!buf || buf->count() == 0) return;
            const int n = buf->count();
            double sx = 0.0, sy = 0.0, sz = 0.0;
            for (int i = 0; i < n; ++i) {
                const DecoratedPoint& p = buf->at(i).point;
                sx += static_cast<double>(p.x);
                sy += static_cast<double>(p.y);
                sz += static_cast<double>(p.z);
            }
            const double mx = sx / n, my = sy / n, mz = sz / n;
            for (int i = 0; i < n; ++i) {
                DecoratedPoint& p = buf->at(i).point;
                p.x_c = static_cast<float>(static_cast<double>(p.x) - mx);
                p.y_c = static_cast<float>(static_cast<double>(p.y) - my);
                p.z_c = static_cast<float>(static_cast<double>(p.z) - mz);
            }
            if (ops) ops->decorated_points += static_cast<std::uint64_t>(n);
            ++refreshed;
        });
        return refreshed;
    }

private:
    struct Record {
        double t;
        PillarIndex where;
    };

    GridConfig cfg_;
    OverflowPolicy policy_;
    int w_, h_;
    std::vector<std::unique_ptr<PillarBuffer>> pillars_;
    std::deque<Record> fifo_;
    int active_count_ = 0;
    std::uint64_t stored_points_ = 0;
};

}  // namespace sscat
