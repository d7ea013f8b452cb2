#pragma once

#include "tissue/antigen.hpp"

#include <cstdint>
#include <mutex>
#include <variant>
#include <vector>

namespace tissue {

struct SignalUpdate {
    std::size_t index = 0;
    double level = 0.0;

    friend bool operator==(const SignalUpdate&, const SignalUpdate&) = default;
};

using Submission = std::variant<Antigen, SignalUpdate>;

/// The only channel from client sessions into a compartment. FIFO; drained
/// whole at the start of every tick.
class IngestQueue {
public:
    void push(Submission s) {
        std::lock_guard lock(mutex_);
        pending_.push_back(s);
        ++pushed_;
    }

    std::vector<Submission> drain() {
        std::lock_guard lock(mutex_);
        std::vector<Submission> out;
        out.swap(pending_);
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return pending_.size();
    }

    std::uint64_t total_pushed() const {
        std::lock_guard lock(mutex_);
        return pushed_;
    }

private:
    mutable std::mutex mutex_;
    std::vector<Submission> pending_;
    std::uint64_t pushed_ = 0;
};

}  // namespace tissue
