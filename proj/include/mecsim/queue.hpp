#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mecsim/mobility.hpp"

namespace mecsim {

class QueueFull : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QueueEntry {
    Task task;
    double arrival_complete_at = 0.0;  // absolute time the upload finishes
    double t_com = 0.0;                // edge compute duration
    double enqueued_at = 0.0;
    RobotState robot;  // state reported with the request
};

struct InService {
    QueueEntry entry;
    double started_at = 0.0;  // may lie in the future while the upload finishes

    double finishes_at() const { return started_at + entry.t_com; }
};

struct TaskDelay {
    TaskId task_id = 0;
    double t_add = 0.0;
    double d = 0.0;  // deadline budget of the delayed task
};

// Single edge server: at most one task in service plus an ordered waiting
// line of at most `capacity` entries. Positions are 1-based; position 1 is
// served next. The waiting line is never reordered after an insertion.
class ServerQueue {
public:
    explicit ServerQueue(int capacity);

    int capacity() const { return capacity_; }
    int length() const { return static_cast<int>(waiting_.size()); }
    bool full() const { return length() >= capacity_; }
    bool idle() const { return !in_service_.has_value(); }

    const std::optional<InService>& in_service() const { return in_service_; }
    const std::vector<QueueEntry>& waiting() const { return waiting_; }

    // Duration from `now` until the server would begin the task at
    // `position`. Each earlier entry starts at the later of server
    // readiness and its own upload completion.
    double ready_time(int position, double now) const;

    // Absolute completion time of every waiting entry, in queue order.
    std::vector<double> completion_times(double now) const;

    void insert(const QueueEntry& e, int position);

    // Extra completion delay each waiting entry suffers if `e` is inserted at
    // `position`. Entries ahead of `position` get 0.
    std::vector<TaskDelay> delta_delays(const QueueEntry& e, int position, double now) const;

    // Moves the waiting head into service if the server is idle. The start
    // time is the later of `now` and the head's upload completion. Returns
    // true if a task was promoted.
    bool start_next(double now);

    // Finishes the in-service task and promotes the next waiting entry.
    QueueEntry complete_head(double now);

private:
    void check_position(int position, int max_position) const;

    int capacity_;
    std::optional<InService> in_service_;
    std::vector<QueueEntry> waiting_;
};

}  // namespace mecsim
