#include "mecsim/queue.hpp"

#include <algorithm>
#include <string>

namespace mecsim {

ServerQueue::ServerQueue(int capacity) : capacity_(capacity) {
    if (capacity < 1) {
        throw InvalidArgument("queue capacity must be at least 1");
    }
}

void ServerQueue::check_position(int position, int max_position) const {
    if (position < 1 || position > max_position) {
        throw InvalidArgument("queue position " + std::to_string(position) +
                              " outside [1, " + std::to_string(max_position) + "]");
    }
}

double ServerQueue::ready_time(int position, double now) const {
    check_position(position, length() + 1);
    double t = now;
    if (in_service_) {
        t = std::max(t, in_service_->finishes_at());
    }
    for (int i = 0; i < position - 1; ++i) {
        const auto& e = waiting_[static_cast<std::size_t>(i)];
        t = std::max(t, e.arrival_complete_at) + e.t_com;
    }
    return t - now;
}

std::vector<double> ServerQueue::completion_times(double now) const {
    std::vector<double> out;
    out.reserve(waiting_.size());
    double t = now;
    if (in_service_) {
        t = std::max(t, in_service_->finishes_at());
    }
    for (const auto& e : waiting_) {
        t = std::max(t, e.arrival_complete_at) + e.t_com;
        out.push_back(t);
    }
    return out;
}

void ServerQueue::insert(const QueueEntry& e, int position) {
    if (full()) {
        throw QueueFull("server queue is full (capacity " + std::to_string(capacity_) + ")");
    }
    check_position(position, length() + 1);
    waiting_.insert(waiting_.begin() + (position - 1), e);
}

std::vector<TaskDelay> ServerQueue::delta_delays(const QueueEntry& e, int position,
                                                 double now) const {
    if (full()) {
        throw QueueFull("server queue is full (capacity " + std::to_string(capacity_) + ")");
    }
    check_position(position, length() + 1);
    std::vector<TaskDelay> out;
    out.reserve(waiting_.size());
    double before = now;
    double after = now;
    if (in_service_) {
        before = std::max(before, in_service_->finishes_at());
        after = before;
    }
    for (int i = 0; i < length(); ++i) {
        const auto& w = waiting_[static_cast<std::size_t>(i)];
        if (i == position - 1) {
            after = std::max(after, e.arrival_complete_at) + e.t_com;
        }
        before = std::max(before, w.arrival_complete_at) + w.t_com;
        after = std::max(after, w.arrival_complete_at) + w.t_com;
        out.push_back({w.task.id, std::max(after - before, 0.0), w.task.d});
    }
    return out;
}

bool ServerQueue::start_next(double now) {
    if (in_service_ || waiting_.empty()) {
        return false;
    }
    const QueueEntry head = waiting_.front();
    waiting_.erase(waiting_.begin());
    in_service_ = InService{head, std::max(now, head.arrival_complete_at)};
    return true;
}

QueueEntry ServerQueue::complete_head(double now) {
    if (!in_service_) {
        throw std::logic_error("complete_head called with no task in service");
    }
    if (now < in_service_->finishes_at() - 1e-9) {
        throw std::logic_error("complete_head called before the in-service task finished");
    }
    QueueEntry done = in_service_->entry;
    in_service_.reset();
    start_next(now);
    return done;
}

}  // namespace mecsim
