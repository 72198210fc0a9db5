#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vardislab::sim {

/// Min-heap of timestamped work items. Items with equal timestamps come out
/// in insertion order.
template <typename Payload>
class EventQueue {
public:
    struct Entry {
        double time;
        std::uint64_t seq;
        Payload payload;
    };

    void schedule(double time, Payload payload) {
        if (time < now_) throw std::logic_error("event scheduled in the past");
        heap_.push_back({time, next_seq_++, std::move(payload)});
        std::push_heap(heap_.begin(), heap_.end(), later);
    }

    [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }
    [[nodiscard]] double now() const noexcept { return now_; }
    [[nodiscard]] double next_time() const { return heap_.front().time; }

    /// Removes the earliest entry and advances the clock to its time.
    Entry pop() {
        std::pop_heap(heap_.begin(), heap_.end(), later);
        Entry e = std::move(heap_.back());
        heap_.pop_back();
        now_ = e.time;
        return e;
    }

private:
    static bool later(const Entry& a, const Entry& b) noexcept {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }

    std::vector<Entry> heap_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
};

}  // namespace vardislab::sim
